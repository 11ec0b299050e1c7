#include "bilevel/exact.hpp"

#include <chrono>
#include <cmath>

#include "bilevel/oracles.hpp"

namespace bilevel {

namespace {

// Lexicographic comparison used for the leader-side argmin tie break.
bool lex_less(const IntVector& a, const IntVector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

template <typename FollowerFn>
BilevelSolution enumerate_leader(std::size_t n_x, const Matrix& a, const Vector& b,
                                 const ExactConfig& cfg, std::vector<LeaderTracePoint>* trace,
                                 FollowerFn&& follower) {
    if (n_x > 24) throw DimensionTooLarge("exact: n_x exceeds guard of 24");
    if (cfg.time_limit_s <= 0.0) throw DimensionMismatch("exact: time limit must be positive");

    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    BilevelSolution best;
    best.status = SolveStatus::infeasible;
    bool timed_out = false;

    const std::size_t limit = std::size_t{1} << n_x;
    Vector x(n_x);
    IntVector xi(n_x);
    for (std::size_t mask = 0; mask < limit; ++mask) {
        if (elapsed() > cfg.time_limit_s) {
            timed_out = true;
            break;
        }
        for (std::size_t i = 0; i < n_x; ++i) {
            const long long bit = static_cast<long long>((mask >> (n_x - 1 - i)) & 1U);
            xi[i] = bit;
            x[i] = static_cast<double>(bit);
        }
        bool feasible = true;
        for (std::size_t r = 0; r < a.rows() && feasible; ++r) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n_x; ++j) lhs += a(r, j) * x[j];
            feasible = lhs <= b[r] + 1e-9;
        }
        if (!feasible) continue;

        IntVector y;
        double leader_obj = 0.0, follower_obj = 0.0;
        if (!follower(xi, y, leader_obj, follower_obj)) continue;
        if (trace != nullptr && cfg.record_all) trace->push_back({xi, leader_obj});

        if (best.status == SolveStatus::infeasible || leader_obj < best.leader_obj - 1e-12 ||
            (std::abs(leader_obj - best.leader_obj) <= 1e-12 && lex_less(xi, best.x))) {
            best.x = xi;
            best.y = y;
            best.leader_obj = leader_obj;
            best.follower_obj = follower_obj;
            best.status = SolveStatus::optimal;
        }
    }
    if (timed_out && best.status == SolveStatus::optimal) best.status = SolveStatus::incumbent_timeout;
    return best;
}

}  // namespace

BilevelSolution solve_exact_quad(const QuadBilevelInstance& inst, const ExactConfig& cfg,
                                 std::vector<LeaderTracePoint>* trace) {
    LexSpec lex{inst.d_x, inst.sense == Sense::pessimistic ? OptDirection::maximize
                                                           : OptDirection::minimize};
    return enumerate_leader(
        inst.n_x, inst.A, inst.b, cfg, trace,
        [&](const IntVector& xi, IntVector& y, double& leader_obj, double& follower_obj) {
            Vector c = inst.C_y * to_real(xi);
            for (std::size_t i = 0; i < inst.n_y; ++i) c[i] += inst.d_y[i];
            const FollowerResponse resp = minimize_iqp_lex(inst.Q_y, c, lex);
            y = resp.v;
            leader_obj = leader_objective_quad(inst, xi, resp.v);
            follower_obj = follower_objective_quad(inst, xi, resp.v);
            return true;
        });
}

BilevelSolution solve_exact_lin(const LinBilevelInstance& inst, const ExactConfig& cfg,
                                std::vector<LeaderTracePoint>* trace) {
    return enumerate_leader(
        inst.n_x, inst.A, inst.b, cfg, trace,
        [&](const IntVector& xi, IntVector& y, double& leader_obj, double& follower_obj) {
            Vector rhs = inst.C_x * to_real(xi);
            for (std::size_t r = 0; r < rhs.size(); ++r) rhs[r] = -(rhs[r] + inst.b_y[r]);
            const IlpResult ilp = solve_ilp(inst.d, OptDirection::maximize, inst.D_y, rhs,
                                            {inst.y_lo, inst.y_hi});
            if (ilp.status != LpStatus::optimal) return false;
            y = ilp.y;
            leader_obj = leader_objective_lin(inst, xi, ilp.y);
            follower_obj = ilp.value;
            return true;
        });
}

}  // namespace bilevel
