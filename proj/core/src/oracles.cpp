#include "bilevel/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bilevel {

using linalg::cholesky;
using linalg::dot;
using linalg::is_diagonal;
using linalg::norm2;
using linalg::solve_spd;
using linalg::solve_with_factor;

namespace {

constexpr long long kNodeBudget = 1'000'000'000LL;

bool entries_integral(const Vector& v) {
    for (double x : v)
        if (x != std::nearbyint(x)) return false;
    return true;
}

bool entries_integral(const Matrix& m) {
    for (double x : m.data())
        if (x != std::nearbyint(x)) return false;
    return true;
}

double eval_f(const Matrix& q, const Vector& c, const IntVector& y) {
    const std::size_t n = y.size();
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = static_cast<double>(y[i]);
        lin += c[i] * yi;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += q(i, j) * static_cast<double>(y[j]);
        quad += yi * row;
    }
    return 0.5 * quad + lin;
}

double eval_f_cont(const Matrix& q, const Vector& c, const Vector& y) {
    const Vector qy = q * y;
    return 0.5 * dot(y, qy) + dot(c, y);
}

// Shared data for the depth-first level-set search. Levels are fixed from
// n-1 down to 0; perm maps level -> original coordinate.
struct DecodeContext {
    std::size_t n = 0;
    const Matrix* q = nullptr;
    const Vector* c = nullptr;
    Vector u;       // continuous minimizer, original coordinates
    double f_u = 0.0;
    Vector q_inv_diag;
    long long budget = kNodeBudget;

    std::vector<std::size_t> perm;
    Matrix r;       // upper Cholesky factor of the permuted Q
    Vector u_p;     // permuted u

    void charge() {
        if (--budget < 0) throw SearchRegionOverflow("iqp: certified search region is intractable");
    }

    void build_permuted(const std::vector<std::size_t>& order) {
        perm = order;
        Matrix qp(n, n);
        u_p.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            u_p[i] = u[perm[i]];
            for (std::size_t j = 0; j < n; ++j) qp(i, j) = (*q)(perm[i], perm[j]);
        }
        r = cholesky(qp);
    }

    double level_sum(const IntVector& z, std::size_t i) const {
        double s = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) s += r(i, j) * (static_cast<double>(z[j]) - u_p[j]);
        return s;
    }

    IntVector to_original(const IntVector& z) const {
        IntVector y(n);
        for (std::size_t i = 0; i < n; ++i) y[perm[i]] = z[i];
        return y;
    }
};

// Phase 1: global integer minimum by Schnorr-Euchner enumeration of the
// shrinking level set 1/2 ||R(z-u)||^2 < delta.
struct MinSearch {
    DecodeContext& ctx;
    IntVector z;
    IntVector best_y;
    double best_f;
    double delta;

    MinSearch(DecodeContext& c, IntVector seed_y, double seed_f)
        : ctx(c), z(c.n, 0), best_y(std::move(seed_y)), best_f(seed_f) {
        reset_delta();
    }

    void reset_delta() {
        const double g = std::max(0.0, best_f - ctx.f_u);
        delta = g + 1e-9 * (1.0 + g);
    }

    void run() { descend(ctx.n, 0.0); }

    void descend(std::size_t level_plus1, double partial) {
        if (level_plus1 == 0) {
            const IntVector y = ctx.to_original(z);
            const double f = eval_f(*ctx.q, *ctx.c, y);
            if (f < best_f) {
                best_f = f;
                best_y = y;
                reset_delta();
            }
            return;
        }
        const std::size_t i = level_plus1 - 1;
        const double rii = ctx.r(i, i);
        const double center = ctx.u_p[i] - ctx.level_sum(z, i) / rii;
        const double remaining = delta - partial;
        if (remaining <= 0.0) return;

        auto term = [&](long long zv) {
            const double t = rii * (static_cast<double>(zv) - center);
            return 0.5 * t * t;
        };
        long long lo = std::llround(center);
        long long hi = lo;
        double t0 = term(lo);
        if (t0 < remaining) {
            ctx.charge();
            z[i] = lo;
            descend(i, partial + t0);
        }
        for (;;) {
            const double t_lo = term(lo - 1);
            const double t_hi = term(hi + 1);
            const double rem = delta - partial;
            if (t_lo >= rem && t_hi >= rem) break;
            if (t_lo <= t_hi) {
                --lo;
                ctx.charge();
                z[i] = lo;
                descend(i, partial + t_lo);
            } else {
                ++hi;
                ctx.charge();
                z[i] = hi;
                descend(i, partial + t_hi);
            }
        }
    }
};

// Phase 2a: best secondary value over the near-optimal set
// { y : f(y) <= f_min + tie_tol }, searched inside the fixed level set
// g <= delta with per-candidate secondary bound pruning.
struct SecondaryValueSearch {
    DecodeContext& ctx;
    Vector d_p;                 // secondary coefficients, permuted, sign-folded
    Vector free_best_prefix;    // sum over levels < i of the best level contribution
    Vector best_contrib;        // per level
    IntVector z;
    double delta;
    double f_cutoff;            // direct-f membership threshold
    double best_sigma;          // in folded (maximization) space
    IntVector best_y;
    bool found = false;

    SecondaryValueSearch(DecodeContext& c, const Vector& secondary, double fold_sign,
                         double delta_in, double f_cutoff_in)
        : ctx(c), z(c.n, 0), delta(delta_in), f_cutoff(f_cutoff_in),
          best_sigma(-std::numeric_limits<double>::infinity()) {
        const std::size_t n = ctx.n;
        d_p.assign(n, 0.0);
        best_contrib.assign(n, 0.0);
        free_best_prefix.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) d_p[i] = fold_sign * secondary[ctx.perm[i]];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t orig = ctx.perm[i];
            const double h = std::sqrt(std::max(0.0, 2.0 * delta * ctx.q_inv_diag[orig])) + 1e-9;
            const double lo = std::ceil(ctx.u[orig] - h);
            const double hi = std::floor(ctx.u[orig] + h);
            best_contrib[i] = std::max(d_p[i] * lo, d_p[i] * hi);
        }
        for (std::size_t i = 0; i < n; ++i) free_best_prefix[i + 1] = free_best_prefix[i] + best_contrib[i];
    }

    void seed(const IntVector& y) {
        double sigma = 0.0;
        for (std::size_t i = 0; i < ctx.n; ++i) sigma += d_p[i] * static_cast<double>(y[ctx.perm[i]]);
        best_sigma = sigma;
        best_y = y;
        found = true;
    }

    void run() { descend(ctx.n, 0.0, 0.0); }

    void descend(std::size_t level_plus1, double partial, double sigma_fixed) {
        if (level_plus1 == 0) {
            const IntVector y = ctx.to_original(z);
            const double f = eval_f(*ctx.q, *ctx.c, y);
            if (f <= f_cutoff && sigma_fixed > best_sigma) {
                best_sigma = sigma_fixed;
                best_y = y;
                found = true;
            }
            return;
        }
        const std::size_t i = level_plus1 - 1;
        const double rii = ctx.r(i, i);
        const double center = ctx.u_p[i] - ctx.level_sum(z, i) / rii;
        const double remaining = delta - partial;
        if (remaining <= 0.0) return;

        auto term = [&](long long zv) {
            const double t = rii * (static_cast<double>(zv) - center);
            return 0.5 * t * t;
        };
        auto try_candidate = [&](long long zv, double t) {
            const double sigma_here = sigma_fixed + d_p[i] * static_cast<double>(zv);
            if (sigma_here + free_best_prefix[i] <= best_sigma) return;  // cannot improve
            ctx.charge();
            z[i] = zv;
            descend(i, partial + t, sigma_here);
        };
        long long lo = std::llround(center);
        long long hi = lo;
        const double t0 = term(lo);
        if (t0 < remaining) try_candidate(lo, t0);
        for (;;) {
            const double t_lo = term(lo - 1);
            const double t_hi = term(hi + 1);
            if (t_lo >= remaining && t_hi >= remaining) break;
            if (t_lo <= t_hi) {
                --lo;
                if (t_lo < remaining) try_candidate(lo, t_lo);
            } else {
                ++hi;
                if (t_hi < remaining) try_candidate(hi, t_hi);
            }
        }
    }
};

// Phase 2b: lexicographically smallest member of the near-optimal set whose
// secondary value matches sigma_target. Levels are permuted so original
// coordinate 0 is fixed first and candidates scan in increasing order, so
// the first accepted leaf is the lexicographic minimum.
struct LexPickSearch {
    DecodeContext& ctx;
    Vector d_p;
    Vector free_min_prefix, free_max_prefix;
    IntVector z;
    double delta;
    double f_cutoff;
    double sigma_target;  // folded space
    double sigma_tol;
    IntVector result;
    bool found = false;

    LexPickSearch(DecodeContext& c, const Vector& secondary, double fold_sign, double delta_in,
                  double f_cutoff_in, double sigma_target_in, double sigma_tol_in)
        : ctx(c), z(c.n, 0), delta(delta_in), f_cutoff(f_cutoff_in),
          sigma_target(sigma_target_in), sigma_tol(sigma_tol_in) {
        const std::size_t n = ctx.n;
        d_p.assign(n, 0.0);
        free_min_prefix.assign(n + 1, 0.0);
        free_max_prefix.assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) d_p[i] = fold_sign * secondary[ctx.perm[i]];
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t orig = ctx.perm[i];
            const double h = std::sqrt(std::max(0.0, 2.0 * delta * ctx.q_inv_diag[orig])) + 1e-9;
            const double lo = std::ceil(ctx.u[orig] - h);
            const double hi = std::floor(ctx.u[orig] + h);
            free_min_prefix[i + 1] = free_min_prefix[i] + std::min(d_p[i] * lo, d_p[i] * hi);
            free_max_prefix[i + 1] = free_max_prefix[i] + std::max(d_p[i] * lo, d_p[i] * hi);
        }
    }

    void run() { descend(ctx.n, 0.0, 0.0); }

    void descend(std::size_t level_plus1, double partial, double sigma_fixed) {
        if (found) return;
        if (level_plus1 == 0) {
            const IntVector y = ctx.to_original(z);
            const double f = eval_f(*ctx.q, *ctx.c, y);
            if (f <= f_cutoff && std::abs(sigma_fixed - sigma_target) <= sigma_tol) {
                result = y;
                found = true;
            }
            return;
        }
        const std::size_t i = level_plus1 - 1;
        const double rii = ctx.r(i, i);
        const double center = ctx.u_p[i] - ctx.level_sum(z, i) / rii;
        const double remaining = delta - partial;
        if (remaining <= 0.0) return;
        const double w = std::sqrt(2.0 * remaining) / rii;
        const long long lo = static_cast<long long>(std::ceil(center - w));
        const long long hi = static_cast<long long>(std::floor(center + w));
        for (long long zv = lo; zv <= hi && !found; ++zv) {
            const double t = rii * (static_cast<double>(zv) - center);
            const double cost = 0.5 * t * t;
            if (cost >= remaining) {
                if (static_cast<double>(zv) > center) break;
                continue;
            }
            const double sigma_here = sigma_fixed + d_p[i] * static_cast<double>(zv);
            if (sigma_here + free_max_prefix[i] < sigma_target - sigma_tol) continue;
            if (sigma_here + free_min_prefix[i] > sigma_target + sigma_tol) continue;
            ctx.charge();
            z[i] = zv;
            descend(i, partial + cost, sigma_here);
        }
    }
};

struct Prepared {
    DecodeContext ctx;
    bool integral = false;
    IntVector v0;
    double f0 = 0.0;
};

Prepared prepare(const Matrix& q, const Vector& c) {
    const std::size_t n = q.rows();
    if (n == 0 || q.cols() != n) throw DimensionMismatch("iqp: Q must be square");
    if (c.size() != n) throw DimensionMismatch("iqp: c length differs from Q");
    if (n > 24) throw DimensionTooLarge("iqp: dimension exceeds guard of 24");

    Prepared p;
    p.ctx.n = n;
    p.ctx.q = &q;
    p.ctx.c = &c;
    p.integral = entries_integral(q) && entries_integral(c);

    const Matrix r_full = cholesky(q);
    Vector neg_c(n);
    for (std::size_t i = 0; i < n; ++i) neg_c[i] = -c[i];
    p.ctx.u = solve_with_factor(r_full, neg_c);
    p.ctx.f_u = eval_f_cont(q, c, p.ctx.u);

    p.ctx.q_inv_diag.assign(n, 0.0);
    Vector e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = 1.0;
        const Vector col = solve_with_factor(r_full, e);
        p.ctx.q_inv_diag[i] = col[i];
        e[i] = 0.0;
    }

    p.v0.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) p.v0[i] = std::llround(p.ctx.u[i]);
    p.f0 = eval_f(q, c, p.v0);

    // Widest certified box fixed first: sort levels by (Q^-1)_ii ascending so
    // the last level (fixed first) carries the widest coordinate.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (p.ctx.q_inv_diag[a] != p.ctx.q_inv_diag[b]) return p.ctx.q_inv_diag[a] < p.ctx.q_inv_diag[b];
        return a < b;
    });
    p.ctx.build_permuted(order);
    return p;
}

FollowerResponse pack_response(const DecodeContext& ctx, const IntVector& v, double f_int) {
    FollowerResponse resp;
    resp.u = ctx.u;
    resp.v = v;
    resp.f_cont = ctx.f_u;
    resp.f_int = f_int;
    Vector diff(ctx.n);
    for (std::size_t i = 0; i < ctx.n; ++i) diff[i] = ctx.u[i] - static_cast<double>(v[i]);
    resp.distance_l2 = norm2(diff);
    return resp;
}

double tie_tolerance(bool integral, double f_int) {
    return integral ? 0.0 : 1e-6 * (1.0 + std::abs(f_int));
}

// Separable exact path for diagonal Q with all-integer data.
FollowerResponse diagonal_integral_lex(const Matrix& q, const Vector& c, const LexSpec* lex) {
    const std::size_t n = q.rows();
    DecodeContext ctx;  // only used for packing u/f_cont
    ctx.n = n;
    Vector u(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (q(i, i) <= 0.0) throw NotPositiveDefinite("iqp: diagonal entry not positive");
        u[i] = -c[i] / q(i, i);
    }
    IntVector v(n);
    double f_int = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const long long fl = static_cast<long long>(std::floor(u[i]));
        const long long ce = fl + 1;
        auto marginal = [&](long long yv) {
            const double y = static_cast<double>(yv);
            return 0.5 * q(i, i) * y * y + c[i] * y;
        };
        const double mf = marginal(fl), mc = marginal(ce);
        if (mf < mc) {
            v[i] = fl;
        } else if (mc < mf) {
            v[i] = ce;
        } else {
            // Exact tie: secondary decides, then the smaller integer.
            if (lex != nullptr && lex->secondary[i] != 0.0) {
                const double fold = lex->direction == OptDirection::maximize ? 1.0 : -1.0;
                v[i] = (fold * lex->secondary[i] * static_cast<double>(ce) >
                        fold * lex->secondary[i] * static_cast<double>(fl))
                           ? ce
                           : fl;
            } else {
                v[i] = fl;
            }
        }
        f_int += marginal(v[i]);
    }
    FollowerResponse resp;
    resp.u = u;
    resp.v = v;
    resp.f_cont = eval_f_cont(q, c, u);
    resp.f_int = f_int;
    Vector diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = u[i] - static_cast<double>(v[i]);
    resp.distance_l2 = norm2(diff);
    return resp;
}

}  // namespace

FollowerResponse minimize_iqp(const Matrix& q, const Vector& c) {
    if (is_diagonal(q) && entries_integral(q) && entries_integral(c))
        return diagonal_integral_lex(q, c, nullptr);
    Prepared p = prepare(q, c);
    MinSearch search(p.ctx, p.v0, p.f0);
    search.run();
    return pack_response(p.ctx, search.best_y, search.best_f);
}

FollowerResponse minimize_iqp_lex(const Matrix& q, const Vector& c, const LexSpec& lex) {
    if (lex.secondary.size() != q.rows())
        throw DimensionMismatch("minimize_iqp_lex: secondary length differs from Q");
    if (is_diagonal(q) && entries_integral(q) && entries_integral(c))
        return diagonal_integral_lex(q, c, &lex);

    Prepared p = prepare(q, c);
    MinSearch search(p.ctx, p.v0, p.f0);
    search.run();
    const double f_min = search.best_f;
    const double tol = tie_tolerance(p.integral, f_min);

    const double g_min = std::max(0.0, f_min - p.ctx.f_u);
    const double delta2 = g_min + tol + 1e-9 * (1.0 + g_min + tol);
    const double f_cutoff = f_min + tol;
    const double fold = lex.direction == OptDirection::maximize ? 1.0 : -1.0;

    SecondaryValueSearch value_search(p.ctx, lex.secondary, fold, delta2, f_cutoff);
    value_search.seed(search.best_y);
    value_search.run();

    const double sigma_star = value_search.best_sigma;
    const bool sigma_integral = p.integral && entries_integral(lex.secondary);
    const double sigma_tol = sigma_integral ? 0.0 : 1e-9 * (1.0 + std::abs(sigma_star));

    // Natural-order permutation: original coordinate 0 fixed first.
    DecodeContext lex_ctx = p.ctx;
    std::vector<std::size_t> natural(p.ctx.n);
    for (std::size_t i = 0; i < p.ctx.n; ++i) natural[i] = p.ctx.n - 1 - i;
    lex_ctx.build_permuted(natural);

    LexPickSearch pick(lex_ctx, lex.secondary, fold, delta2, f_cutoff, sigma_star, sigma_tol);
    pick.run();
    const IntVector v = pick.found ? pick.result : value_search.best_y;
    return pack_response(p.ctx, v, eval_f(q, c, v));
}

FollowerResponse round_diagonal_iqp(const Matrix& q, const Vector& c) {
    if (!is_diagonal(q)) throw NotDiagonal("round_diagonal_iqp: matrix has off-diagonal entries");
    if (c.size() != q.rows()) throw DimensionMismatch("round_diagonal_iqp: c length differs from Q");
    const std::size_t n = q.rows();
    Vector u(n);
    IntVector v(n);
    double f_int = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (q(i, i) <= 0.0) throw NotPositiveDefinite("round_diagonal_iqp: diagonal entry not positive");
        u[i] = -c[i] / q(i, i);
        const long long fl = static_cast<long long>(std::floor(u[i]));
        const long long ce = fl + 1;
        auto marginal = [&](long long yv) {
            const double y = static_cast<double>(yv);
            return 0.5 * q(i, i) * y * y + c[i] * y;
        };
        v[i] = marginal(fl) <= marginal(ce) ? fl : ce;
        f_int += marginal(v[i]);
    }
    FollowerResponse resp;
    resp.u = u;
    resp.v = v;
    resp.f_cont = eval_f_cont(q, c, u);
    resp.f_int = f_int;
    Vector diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = u[i] - static_cast<double>(v[i]);
    resp.distance_l2 = norm2(diff);
    return resp;
}

FollowerResponse round_diagonal_iqp_lex(const Matrix& q, const Vector& c, const LexSpec& lex) {
    if (!is_diagonal(q)) throw NotDiagonal("round_diagonal_iqp_lex: matrix has off-diagonal entries");
    if (entries_integral(q) && entries_integral(c)) return diagonal_integral_lex(q, c, &lex);
    // Real-entried diagonal data: ties are resolved through the generic path.
    return minimize_iqp_lex(q, c, lex);
}

}  // namespace bilevel
