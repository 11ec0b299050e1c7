#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bilevel/oracles.hpp"

// Two-phase dense-tableau simplex with Bland's rule. Sizes here are tiny
// (tens of rows), so the tableau form is chosen for transparency over speed.

namespace bilevel {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-9;

struct Tableau {
    // rows x (cols + 1); last column is the RHS.
    std::size_t rows = 0, cols = 0;
    std::vector<double> t;
    std::vector<std::size_t> basis;  // basic column per row

    double& at(std::size_t i, std::size_t j) { return t[i * (cols + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return t[i * (cols + 1) + j]; }
    double& rhs(std::size_t i) { return t[i * (cols + 1) + cols]; }
    double rhs(std::size_t i) const { return t[i * (cols + 1) + cols]; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t j = 0; j <= cols; ++j) t[pr * (cols + 1) + j] /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == pr) continue;
            const double f = at(i, pc);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) t[i * (cols + 1) + j] -= f * t[pr * (cols + 1) + j];
        }
        basis[pr] = pc;
    }
};

// Maximizes obj over the tableau with Bland's rule. `allowed` masks columns
// that may enter. Returns false if unbounded (cannot happen with the finite
// bounds this project feeds in, but guarded anyway).
bool run_simplex(Tableau& tab, std::vector<double>& obj, double& value,
                 const std::vector<bool>& allowed) {
    // Reduced costs maintained in a separate row: obj expressed over nonbasic.
    // Start by pricing out the current basis.
    for (std::size_t i = 0; i < tab.rows; ++i) {
        const double cb = obj[tab.basis[i]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j < tab.cols; ++j) obj[j] -= cb * tab.at(i, j);
        value += cb * tab.rhs(i);
    }
    const std::size_t max_iters = 10000 * (tab.rows + tab.cols);
    for (std::size_t iter = 0; iter <= max_iters; ++iter) {
        if (iter == max_iters) throw NoConvergence("simplex: iteration cap reached");
        std::size_t enter = tab.cols;
        for (std::size_t j = 0; j < tab.cols; ++j) {
            if (!allowed[j]) continue;
            if (obj[j] > kPivotTol) {  // Bland: first improving index
                enter = j;
                break;
            }
        }
        if (enter == tab.cols) return true;  // optimal
        std::size_t leave = tab.rows;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tab.rows; ++i) {
            const double a = tab.at(i, enter);
            if (a > kPivotTol) {
                const double ratio = tab.rhs(i) / a;
                if (ratio < best_ratio - kPivotTol ||
                    (ratio < best_ratio + kPivotTol && (leave == tab.rows || tab.basis[i] < tab.basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
        }
        if (leave == tab.rows) return false;  // unbounded
        const double cj = obj[enter];
        tab.pivot(leave, enter);
        // Update reduced costs for the pivot.
        for (std::size_t j = 0; j < tab.cols; ++j) obj[j] -= cj * tab.at(leave, j);
        value += cj * tab.rhs(leave);
    }
    return true;  // unreachable
}

}  // namespace

LpResult solve_lp(const Vector& objective, OptDirection direction, const Matrix& d,
                  const Vector& rhs, const VarBounds& bounds) {
    const std::size_t n = objective.size();
    const std::size_t m = d.rows();
    if (d.cols() != n && m > 0) throw DimensionMismatch("solve_lp: D column count differs from objective");
    if (rhs.size() != m) throw DimensionMismatch("solve_lp: rhs length differs from D rows");
    if (bounds.lo.size() != n || bounds.hi.size() != n)
        throw DimensionMismatch("solve_lp: bounds length differs from objective");
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(bounds.lo[j]) || !std::isfinite(bounds.hi[j]))
            throw DimensionMismatch("solve_lp: bounds must be finite");
        if (bounds.lo[j] > bounds.hi[j] + kFeasTol) return {LpStatus::infeasible, {}, 0.0};
    }

    // Shift y = lo + s with s in [0, hi-lo]; rows: D s <= rhs - D lo plus
    // the upper bounds s_j <= hi_j - lo_j.
    const std::size_t rows = m + n;
    const std::size_t structural = n;
    const std::size_t total_cols = structural + rows;  // + slack per row

    std::vector<double> row_rhs(rows);
    Matrix coef(rows, structural);
    for (std::size_t i = 0; i < m; ++i) {
        double shift = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            coef(i, j) = d(i, j);
            shift += d(i, j) * bounds.lo[j];
        }
        row_rhs[i] = rhs[i] - shift;
    }
    for (std::size_t j = 0; j < n; ++j) {
        coef(m + j, j) = 1.0;
        row_rhs[m + j] = bounds.hi[j] - bounds.lo[j];
    }

    // Normalize to nonnegative RHS; negated rows get artificials in phase 1.
    std::size_t art_count = 0;
    for (std::size_t i = 0; i < rows; ++i)
        if (row_rhs[i] < 0.0) ++art_count;

    Tableau tab;
    tab.rows = rows;
    tab.cols = total_cols + art_count;
    tab.t.assign(rows * (tab.cols + 1), 0.0);
    tab.basis.assign(rows, 0);

    std::size_t art_next = total_cols;
    for (std::size_t i = 0; i < rows; ++i) {
        const double sign = row_rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < structural; ++j) tab.at(i, j) = sign * coef(i, j);
        tab.at(i, structural + i) = sign;  // slack
        tab.rhs(i) = sign * row_rhs[i];
        if (sign < 0.0) {
            tab.at(i, art_next) = 1.0;
            tab.basis[i] = art_next++;
        } else {
            tab.basis[i] = structural + i;
        }
    }

    std::vector<bool> allowed(tab.cols, true);
    if (art_count > 0) {
        // Phase 1: maximize -(sum of artificials).
        std::vector<double> phase1(tab.cols, 0.0);
        for (std::size_t j = total_cols; j < tab.cols; ++j) phase1[j] = -1.0;
        double p1val = 0.0;
        if (!run_simplex(tab, phase1, p1val, allowed)) return {LpStatus::infeasible, {}, 0.0};
        if (p1val < -1e-7) return {LpStatus::infeasible, {}, 0.0};
        // Drive any artificial still basic (at zero) out if possible.
        for (std::size_t i = 0; i < rows; ++i) {
            if (tab.basis[i] >= total_cols) {
                for (std::size_t j = 0; j < total_cols; ++j)
                    if (std::abs(tab.at(i, j)) > kPivotTol) {
                        tab.pivot(i, j);
                        break;
                    }
            }
        }
        for (std::size_t j = total_cols; j < tab.cols; ++j) allowed[j] = false;
    }

    const double dir_sign = direction == OptDirection::maximize ? 1.0 : -1.0;
    std::vector<double> obj(tab.cols, 0.0);
    for (std::size_t j = 0; j < structural; ++j) obj[j] = dir_sign * objective[j];
    double value = 0.0;
    if (!run_simplex(tab, obj, value, allowed))
        throw Error("solve_lp: unbounded despite finite bounds");

    Vector s(structural, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        if (tab.basis[i] < structural) s[tab.basis[i]] = tab.rhs(i);
    Vector y(n);
    double true_value = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        y[j] = bounds.lo[j] + s[j];
        true_value += objective[j] * y[j];
    }
    return {LpStatus::optimal, std::move(y), true_value};
}

IlpResult solve_ilp(const Vector& objective, OptDirection direction, const Matrix& d,
                    const Vector& rhs, const VarBounds& bounds) {
    const std::size_t n = objective.size();
    if (n > 24) throw DimensionTooLarge("solve_ilp: dimension exceeds guard of 24");

    struct Node {
        VarBounds bounds;
    };
    std::vector<Node> stack;
    stack.push_back({bounds});

    const double dir_sign = direction == OptDirection::maximize ? 1.0 : -1.0;
    bool have_incumbent = false;
    IlpResult best;

    while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();

        const LpResult lp = solve_lp(objective, direction, d, rhs, node.bounds);
        if (lp.status != LpStatus::optimal) continue;
        if (have_incumbent && dir_sign * lp.value <= dir_sign * best.value + 1e-9) continue;

        // Most fractional coordinate.
        std::size_t branch = n;
        double best_frac = 1e-6;
        for (std::size_t j = 0; j < n; ++j) {
            const double frac = std::abs(lp.y[j] - std::nearbyint(lp.y[j]));
            if (frac > best_frac) {
                best_frac = frac;
                branch = j;
            }
        }
        if (branch == n) {
            IntVector y(n);
            for (std::size_t j = 0; j < n; ++j) y[j] = static_cast<long long>(std::nearbyint(lp.y[j]));
            bool ok = true;
            for (std::size_t i = 0; i < d.rows() && ok; ++i) {
                double lhs = 0.0;
                for (std::size_t j = 0; j < n; ++j) lhs += d(i, j) * static_cast<double>(y[j]);
                ok = lhs <= rhs[i] + 1e-6;
            }
            for (std::size_t j = 0; j < n && ok; ++j)
                ok = static_cast<double>(y[j]) >= node.bounds.lo[j] - 1e-6 &&
                     static_cast<double>(y[j]) <= node.bounds.hi[j] + 1e-6;
            if (ok) {
                double value = 0.0;
                for (std::size_t j = 0; j < n; ++j) value += objective[j] * static_cast<double>(y[j]);
                if (!have_incumbent || dir_sign * value > dir_sign * best.value) {
                    best = {LpStatus::optimal, std::move(y), value};
                    have_incumbent = true;
                }
                continue;
            }
            // Rounding produced an infeasible point: branch on the largest
            // fractional part even if below the integrality threshold.
            for (std::size_t j = 0; j < n; ++j) {
                const double frac = std::abs(lp.y[j] - std::nearbyint(lp.y[j]));
                if (frac > 1e-12 && (branch == n || frac > best_frac)) {
                    best_frac = frac;
                    branch = j;
                }
            }
            if (branch == n) continue;  // exactly integral yet infeasible: dead node
        }

        Node down{node.bounds}, up{node.bounds};
        down.bounds.hi[branch] = std::floor(lp.y[branch]);
        up.bounds.lo[branch] = std::ceil(lp.y[branch]);
        // Depth-first: push the branch nearer the LP optimum last so it is
        // explored first.
        if (lp.y[branch] - std::floor(lp.y[branch]) > 0.5) {
            stack.push_back(std::move(down));
            stack.push_back(std::move(up));
        } else {
            stack.push_back(std::move(up));
            stack.push_back(std::move(down));
        }
    }
    return best;
}

BinaryLpResult solve_binary_linear(const Vector& c, const Matrix& a, const Vector& b) {
    const std::size_t n = c.size();
    if (n > 24) throw DimensionTooLarge("solve_binary_linear: dimension exceeds guard of 24");
    if (a.rows() != b.size()) throw DimensionMismatch("solve_binary_linear: A rows differ from b length");
    if (a.rows() > 0 && a.cols() != n) throw DimensionMismatch("solve_binary_linear: A columns differ from c length");

    BinaryLpResult result;
    Vector x(n);
    const std::size_t limit = std::size_t{1} << n;
    // Mask order equals lexicographic order of the bit vector with x[0] as
    // the most significant bit, so the first strict improvement wins ties.
    for (std::size_t mask = 0; mask < limit; ++mask) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>((mask >> (n - 1 - i)) & 1U);
        bool feasible = true;
        for (std::size_t r = 0; r < a.rows() && feasible; ++r) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += a(r, j) * x[j];
            feasible = lhs <= b[r] + kFeasTol;
        }
        if (!feasible) continue;
        const double value = linalg::dot(c, x);
        if (result.status == LpStatus::infeasible || value < result.value - 1e-12) {
            result.status = LpStatus::optimal;
            result.value = value;
            result.x.assign(n, 0);
            for (std::size_t i = 0; i < n; ++i) result.x[i] = static_cast<long long>(x[i]);
        }
    }
    return result;
}

}  // namespace bilevel
