#pragma once

#include <utility>
#include <vector>

#include "bilevel/model.hpp"

namespace bilevel {

struct ExactConfig {
    double time_limit_s = 120.0;
    bool record_all = false;
};

// Leader value observed at one enumerated leader point.
struct LeaderTracePoint {
    IntVector x;
    double leader_obj;
};

// Reference solver: enumerate every feasible binary leader point and answer
// each with the exact (tie-broken) follower response. The incumbent is
// always returned; status reports whether enumeration completed in time.
BilevelSolution solve_exact_quad(const QuadBilevelInstance& inst, const ExactConfig& cfg,
                                 std::vector<LeaderTracePoint>* trace = nullptr);

BilevelSolution solve_exact_lin(const LinBilevelInstance& inst, const ExactConfig& cfg,
                                std::vector<LeaderTracePoint>* trace = nullptr);

}  // namespace bilevel
