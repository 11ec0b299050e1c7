#include "bilevel/foresight.hpp"

#include <chrono>
#include <cmath>

namespace bilevel {

using linalg::dot;
using linalg::norm1;
using linalg::norm2;
using linalg::norm_inf;
using linalg::solve_spd;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

double certify_ex_ante(double l2, double prox) {
    if (l2 < 0.0 || prox < 0.0) throw DimensionMismatch("certify_ex_ante: arguments must be >= 0");
    return 2.0 * l2 * prox;
}

double certify_linear_case(const Matrix& q, const Vector& d_x) {
    return 2.0 * prox_linear_term_bound(q, d_x);
}

double compose_apx_bound(double f_om, double alpha, double beta, double l2, double prox) {
    if (alpha < 1.0) throw DimensionMismatch("compose_apx_bound: alpha must be >= 1");
    if (beta < 0.0) throw DimensionMismatch("compose_apx_bound: beta must be >= 0");
    return alpha * f_om + beta + (alpha + 1.0) * l2 * prox;
}

ApproxResult relaxed_foresight_quad(const QuadBilevelInstance& inst) {
    ApproxResult out;
    const auto t0 = std::chrono::steady_clock::now();

    // FRV leader cost: h_x + C_y^T (-Q^-1 d_x) on x, constant term dropped.
    const Vector qinv_dx = solve_spd(inst.Q_y, inst.d_x);
    Vector c_eff(inst.n_x);
    for (std::size_t j = 0; j < inst.n_x; ++j) {
        double coupling = 0.0;
        for (std::size_t i = 0; i < inst.n_y; ++i) coupling += inst.C_y(i, j) * qinv_dx[i];
        c_eff[j] = inst.h_x[j] - coupling;
    }
    const BinaryLpResult frv = solve_binary_linear(c_eff, inst.A, inst.b);
    out.frv_seconds = seconds_since(t0);
    if (frv.status != LpStatus::optimal) {
        out.solution.status = SolveStatus::infeasible;
        return out;
    }
    out.frv_leader = frv.x;

    // Continuous follower response: Q y = -(C x + d_y).
    Vector rhs = inst.C_y * to_real(frv.x);
    for (std::size_t i = 0; i < inst.n_y; ++i) rhs[i] = -(rhs[i] + inst.d_y[i]);
    out.frv_follower_cont = solve_spd(inst.Q_y, rhs);

    const auto t1 = std::chrono::steady_clock::now();
    Vector c_follower(inst.n_y);
    for (std::size_t i = 0; i < inst.n_y; ++i) c_follower[i] = -rhs[i];
    LexSpec lex{inst.d_x, inst.sense == Sense::pessimistic ? OptDirection::maximize
                                                           : OptDirection::minimize};
    const FollowerResponse resp = minimize_iqp_lex(inst.Q_y, c_follower, lex);
    out.follower_seconds = seconds_since(t1);

    out.solution.x = frv.x;
    out.solution.y = resp.v;
    out.solution.leader_obj = leader_objective_quad(inst, frv.x, resp.v);
    out.solution.follower_obj = follower_objective_quad(inst, frv.x, resp.v);
    out.solution.status = SolveStatus::optimal;

    GapCertificate& cert = out.certificate;
    cert.L2 = norm2(inst.d_x);
    cert.prox_used = linalg::is_diagonal(inst.Q_y) ? prox_diagonal(inst.n_y)
                                                   : prox_bound_quad(inst.Q_y);
    cert.ex_ante = certify_ex_ante(cert.L2, cert.prox_used);
    const Vector gap = linalg::sub(to_real(resp.v), out.frv_follower_cont);
    cert.ex_post = cert.L2 * (cert.prox_used + norm2(gap));
    if (cert.L2 > 0.0) {
        cert.linear_case = certify_linear_case(inst.Q_y, inst.d_x);
        cert.has_linear_case = true;
    }
    return out;
}

ApproxResult relaxed_foresight_lin(const LinBilevelInstance& inst) {
    if (inst.n_x > 24) throw DimensionTooLarge("relaxed_foresight_lin: n_x exceeds guard of 24");
    ApproxResult out;
    const auto t0 = std::chrono::steady_clock::now();

    // Per-x LP scan of the FRV. Misalignment makes the relaxed follower's
    // optimal d^T y unique in value, so the leader value at x is
    // h_x^T x + LP(x); the best x wins, ties to the lexicographically
    // smallest bit string (mask order).
    const std::size_t limit = std::size_t{1} << inst.n_x;
    bool found = false;
    double best_value = 0.0;
    IntVector best_x;
    Vector best_yhat;
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
        const LpResult lp = solve_lp(inst.d, OptDirection::maximize, inst.D_y, rhs,
                                     {inst.y_lo, inst.y_hi});
        if (lp.status != LpStatus::optimal) continue;  // validated instances never hit this
        const double value = dot(inst.h_x, x) + lp.value;
        if (!found || value < best_value - 1e-12) {
            found = true;
            best_value = value;
            best_yhat = lp.y;
            best_x.assign(inst.n_x, 0);
            for (std::size_t i = 0; i < inst.n_x; ++i) best_x[i] = static_cast<long long>(x[i]);
        }
    }
    out.frv_seconds = seconds_since(t0);
    if (!found) {
        out.solution.status = SolveStatus::infeasible;
        return out;
    }
    out.frv_leader = best_x;
    out.frv_follower_cont = best_yhat;

    const auto t1 = std::chrono::steady_clock::now();
    Vector rhs = inst.C_x * to_real(best_x);
    for (std::size_t r = 0; r < rhs.size(); ++r) rhs[r] = -(rhs[r] + inst.b_y[r]);
    const IlpResult ilp = solve_ilp(inst.d, OptDirection::maximize, inst.D_y, rhs,
                                    {inst.y_lo, inst.y_hi});
    out.follower_seconds = seconds_since(t1);
    if (ilp.status != LpStatus::optimal) {
        out.solution.status = SolveStatus::infeasible;
        return out;
    }

    out.solution.x = best_x;
    out.solution.y = ilp.y;
    out.solution.leader_obj = leader_objective_lin(inst, best_x, ilp.y);
    out.solution.follower_obj = ilp.value;
    out.solution.status = SolveStatus::optimal;

    GapCertificate& cert = out.certificate;
    const std::size_t m = inst.D_y.rows();
    const long long delta_subdet = linalg::max_abs_subdeterminant(inst.D_y);
    long long delta_entry = 0;
    for (double v : inst.D_y.data())
        delta_entry = std::max(delta_entry, static_cast<long long>(std::llround(std::abs(v))));
    cert.lin_l_inf = 2.0 * norm1(inst.d) * cook_prox_bound(inst.n_y, delta_subdet);
    cert.lin_l1 = m > 0 ? 2.0 * norm_inf(inst.d) * ew_prox_bound(m, delta_entry) : 0.0;
    return out;
}

}  // namespace bilevel
