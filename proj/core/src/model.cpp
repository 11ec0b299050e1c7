#include "bilevel/model.hpp"

#include <cmath>

#include "bilevel/oracles.hpp"

namespace bilevel {

using linalg::dot;

Vector to_real(const IntVector& v) {
    Vector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = static_cast<double>(v[i]);
    return r;
}

double leader_objective_quad(const QuadBilevelInstance& inst, const Vector& x, const Vector& y) {
    if (x.size() != inst.n_x || y.size() != inst.n_y)
        throw DimensionMismatch("leader_objective_quad: argument dimensions differ from instance");
    return dot(inst.h_x, x) + dot(inst.d_x, y);
}

double leader_objective_quad(const QuadBilevelInstance& inst, const IntVector& x, const IntVector& y) {
    return leader_objective_quad(inst, to_real(x), to_real(y));
}

double follower_objective_quad(const QuadBilevelInstance& inst, const Vector& x, const Vector& y) {
    if (x.size() != inst.n_x || y.size() != inst.n_y)
        throw DimensionMismatch("follower_objective_quad: argument dimensions differ from instance");
    const Vector qy = inst.Q_y * y;
    const Vector cx = inst.C_y * x;
    return 0.5 * dot(y, qy) + dot(cx, y) + dot(inst.d_y, y);
}

double follower_objective_quad(const QuadBilevelInstance& inst, const IntVector& x, const IntVector& y) {
    return follower_objective_quad(inst, to_real(x), to_real(y));
}

double leader_objective_lin(const LinBilevelInstance& inst, const Vector& x, const Vector& y) {
    if (x.size() != inst.n_x || y.size() != inst.n_y)
        throw DimensionMismatch("leader_objective_lin: argument dimensions differ from instance");
    return dot(inst.h_x, x) + dot(inst.d, y);
}

double leader_objective_lin(const LinBilevelInstance& inst, const IntVector& x, const IntVector& y) {
    return leader_objective_lin(inst, to_real(x), to_real(y));
}

namespace {

bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Matrix& m) {
    for (double x : m.data())
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_integral(const Matrix& m) {
    for (double x : m.data())
        if (std::abs(x - std::nearbyint(x)) > 1e-9) return false;
    return true;
}

bool all_integral(const Vector& v) {
    for (double x : v)
        if (std::abs(x - std::nearbyint(x)) > 1e-9) return false;
    return true;
}

void check_dim(std::vector<Violation>& out, const char* field, bool ok, const std::string& detail) {
    if (!ok) out.push_back({field, "DimensionMismatch", detail});
}

void check_finite_v(std::vector<Violation>& out, const char* field, const Vector& v) {
    if (!all_finite(v)) out.push_back({field, "NotFinite", "vector contains a non-finite entry"});
}

void check_finite_m(std::vector<Violation>& out, const char* field, const Matrix& m) {
    if (!all_finite(m)) out.push_back({field, "NotFinite", "matrix contains a non-finite entry"});
}

}  // namespace

std::vector<Violation> validate(const QuadBilevelInstance& inst) {
    std::vector<Violation> out;
    check_dim(out, "h_x", inst.h_x.size() == inst.n_x, "h_x length must equal n_x");
    check_dim(out, "d_x", inst.d_x.size() == inst.n_y, "d_x length must equal n_y");
    check_dim(out, "A", inst.A.cols() == inst.n_x, "A column count must equal n_x");
    check_dim(out, "b", inst.b.size() == inst.A.rows(), "b length must equal row count of A");
    check_dim(out, "Q_y", inst.Q_y.rows() == inst.n_y && inst.Q_y.cols() == inst.n_y,
              "Q_y must be n_y x n_y");
    check_dim(out, "C_y", inst.C_y.rows() == inst.n_y && inst.C_y.cols() == inst.n_x,
              "C_y must be n_y x n_x");
    check_dim(out, "d_y", inst.d_y.size() == inst.n_y, "d_y length must equal n_y");
    check_finite_v(out, "h_x", inst.h_x);
    check_finite_v(out, "d_x", inst.d_x);
    check_finite_m(out, "A", inst.A);
    check_finite_v(out, "b", inst.b);
    check_finite_m(out, "Q_y", inst.Q_y);
    check_finite_m(out, "C_y", inst.C_y);
    check_finite_v(out, "d_y", inst.d_y);

    if (inst.Q_y.rows() == inst.n_y && inst.Q_y.cols() == inst.n_y && all_finite(inst.Q_y)) {
        if (!linalg::is_symmetric(inst.Q_y)) {
            out.push_back({"Q_y", "NotSymmetric", "Q_y deviates from symmetry beyond tolerance"});
        } else {
            try {
                linalg::cholesky(inst.Q_y);
            } catch (const NotPositiveDefinite&) {
                out.push_back({"Q_y", "NotPositiveDefinite", "Q_y rejected by Cholesky"});
            }
        }
    }
    return out;
}

std::vector<Violation> validate(const LinBilevelInstance& inst) {
    std::vector<Violation> out;
    const std::size_t m = inst.D_y.rows();
    check_dim(out, "h_x", inst.h_x.size() == inst.n_x, "h_x length must equal n_x");
    check_dim(out, "d", inst.d.size() == inst.n_y, "d length must equal n_y");
    check_dim(out, "A", inst.A.cols() == inst.n_x, "A column count must equal n_x");
    check_dim(out, "b", inst.b.size() == inst.A.rows(), "b length must equal row count of A");
    check_dim(out, "C_x", inst.C_x.rows() == m && inst.C_x.cols() == inst.n_x, "C_x must be m x n_x");
    check_dim(out, "b_y", inst.b_y.size() == m, "b_y length must equal m");
    check_dim(out, "D_y", inst.D_y.cols() == inst.n_y, "D_y column count must equal n_y");
    check_dim(out, "y_lo", inst.y_lo.size() == inst.n_y, "y_lo length must equal n_y");
    check_dim(out, "y_hi", inst.y_hi.size() == inst.n_y, "y_hi length must equal n_y");
    if (!out.empty()) return out;

    check_finite_v(out, "h_x", inst.h_x);
    check_finite_v(out, "d", inst.d);
    check_finite_m(out, "A", inst.A);
    check_finite_v(out, "b", inst.b);
    check_finite_m(out, "C_x", inst.C_x);
    check_finite_v(out, "b_y", inst.b_y);
    check_finite_m(out, "D_y", inst.D_y);
    check_finite_v(out, "y_lo", inst.y_lo);
    check_finite_v(out, "y_hi", inst.y_hi);
    if (!all_integral(inst.C_x)) out.push_back({"C_x", "NotIntegral", "C_x entries must be integers"});
    if (!all_integral(inst.b_y)) out.push_back({"b_y", "NotIntegral", "b_y entries must be integers"});
    if (!all_integral(inst.D_y)) out.push_back({"D_y", "NotIntegral", "D_y entries must be integers"});
    if (!all_integral(inst.y_lo) || !all_integral(inst.y_hi))
        out.push_back({"y_bounds", "NotIntegral", "y bounds must be integers"});
    for (std::size_t j = 0; j < inst.n_y && j < inst.y_lo.size() && j < inst.y_hi.size(); ++j)
        if (inst.y_lo[j] > inst.y_hi[j]) {
            out.push_back({"y_bounds", "EmptyRange", "y_lo exceeds y_hi"});
            break;
        }
    if (!out.empty()) return out;

    // Desk-scale follower-feasibility sweep over every leader-feasible x.
    if (inst.n_x <= 24) {
        const std::size_t limit = std::size_t{1} << inst.n_x;
        Vector x(inst.n_x);
        for (std::size_t mask = 0; mask < limit; ++mask) {
            for (std::size_t i = 0; i < inst.n_x; ++i)
                x[i] = static_cast<double>((mask >> (inst.n_x - 1 - i)) & 1U);
            const Vector ax = inst.A * x;
            bool feasible = true;
            for (std::size_t r = 0; r < ax.size(); ++r)
                if (ax[r] > inst.b[r] + 1e-9) {
                    feasible = false;
                    break;
                }
            if (!feasible) continue;
            Vector rhs = inst.C_x * x;
            for (std::size_t r = 0; r < rhs.size(); ++r) rhs[r] = -(rhs[r] + inst.b_y[r]);
            const auto lp = solve_lp(inst.d, OptDirection::maximize, inst.D_y, rhs,
                                     {inst.y_lo, inst.y_hi});
            if (lp.status != LpStatus::optimal) {
                out.push_back({"follower", "InfeasibleFollower",
                               "follower infeasible for a leader-feasible x"});
                break;
            }
        }
    }
    return out;
}

}  // namespace bilevel
