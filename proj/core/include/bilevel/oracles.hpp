#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "bilevel/model.hpp"

namespace bilevel {

enum class OptDirection { minimize, maximize };

// Secondary objective used to break ties among integer minimizers of the
// follower: maximize encodes the pessimistic choice, minimize the optimistic.
struct LexSpec {
    Vector secondary;
    OptDirection direction = OptDirection::minimize;
};

enum class LpStatus { optimal, infeasible };

struct BinaryLpResult {
    LpStatus status = LpStatus::infeasible;
    IntVector x;
    double value = 0.0;
};

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Vector y;
    double value = 0.0;
};

struct IlpResult {
    LpStatus status = LpStatus::infeasible;
    IntVector y;
    double value = 0.0;
};

struct VarBounds {
    Vector lo;
    Vector hi;
};

// Minimizes c^T x over {0,1}^{n_x} intersected with {A x <= b} by
// enumeration (n_x <= 24). Ties go to the lexicographically smallest
// bit string.
BinaryLpResult solve_binary_linear(const Vector& c, const Matrix& a, const Vector& b);

// Global minimum of 1/2 y^T Q y + c^T y over Z^n for SPD Q. The integer
// search is a depth-first branch-and-bound over the level-set region
// 1/2 (y-u)^T Q (y-u) <= f(round(u)) - f(u), which certifiably contains
// every integer minimizer; coordinates are fixed widest-box-first and
// nodes are bounded by the partially-fixed continuous minimum.
FollowerResponse minimize_iqp(const Matrix& q, const Vector& c);

// As minimize_iqp, then breaks ties among near-optimal integer points
// (tolerance 0 for all-integer data, else 1e-6*(1+|f_int|)) by optimizing
// lex.secondary in lex.direction; remaining ties go to the
// lexicographically smallest vector.
FollowerResponse minimize_iqp_lex(const Matrix& q, const Vector& c, const LexSpec& lex);

// Diagonal shortcut: the integer optimum is the componentwise rounding of
// the continuous minimizer. Exact .5 ties (both neighbors optimal) resolve
// to the smaller integer; the lex variant sees both neighbors.
FollowerResponse round_diagonal_iqp(const Matrix& q, const Vector& c);
FollowerResponse round_diagonal_iqp_lex(const Matrix& q, const Vector& c, const LexSpec& lex);

// Dense-tableau two-phase simplex with Bland's rule; bounds must be finite.
LpResult solve_lp(const Vector& objective, OptDirection direction, const Matrix& d,
                  const Vector& rhs, const VarBounds& bounds);

// Branch-and-bound on LP relaxations, branching on the most fractional
// coordinate, depth-first with best-bound pruning.
IlpResult solve_ilp(const Vector& objective, OptDirection direction, const Matrix& d,
                    const Vector& rhs, const VarBounds& bounds);

}  // namespace bilevel
