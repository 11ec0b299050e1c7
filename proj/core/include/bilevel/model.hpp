#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bilevel/linalg.hpp"

namespace bilevel {

using linalg::Matrix;
using linalg::Vector;
using IntVector = std::vector<long long>;

enum class Sense { optimistic, pessimistic };

inline const char* to_string(Sense s) { return s == Sense::optimistic ? "optimistic" : "pessimistic"; }

// Bilevel program with a binary leader and an unconstrained integer
// convex-quadratic follower:
//   min_x  h_x^T x + d_x^T y   s.t.  A x <= b, x in {0,1}^{n_x},
//   y in argmin_{y in Z^{n_y}}  1/2 y^T Q_y y + (C_y x + d_y)^T y,
// with optimistic/pessimistic tie handling given by `sense`.
struct QuadBilevelInstance {
    std::size_t n_x = 0;
    std::size_t n_y = 0;
    Vector h_x;   // length n_x
    Vector d_x;   // length n_y, leader cost on follower variables
    Matrix A;     // m_x x n_x
    Vector b;     // length m_x
    Matrix Q_y;   // n_y x n_y, SPD
    Matrix C_y;   // n_y x n_x
    Vector d_y;   // length n_y
    Sense sense = Sense::optimistic;
};

// Bilevel program with misaligned objectives and an integer-linear follower:
//   min_x  h_x^T x + d^T y   s.t.  A x <= b, x in {0,1}^{n_x},
//   y in argmax_{y in Z^{n_y}}  d^T y  s.t.  C_x x + b_y + D_y y <= 0,
//                                            y_lo <= y <= y_hi.
// Explicit finite bounds keep the follower's LP/ILP total.
struct LinBilevelInstance {
    std::size_t n_x = 0;
    std::size_t n_y = 0;
    Vector h_x;   // length n_x
    Vector d;     // length n_y, shared misaligned objective
    Matrix A;     // leader polyhedron
    Vector b;
    Matrix C_x;   // m x n_x, integer entries
    Vector b_y;   // length m, integer entries
    Matrix D_y;   // m x n_y, integer entries
    Vector y_lo;  // length n_y
    Vector y_hi;  // length n_y
};

enum class SolveStatus { optimal, incumbent_timeout, infeasible };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::incumbent_timeout: return "incumbent_timeout";
        default: return "infeasible";
    }
}

struct BilevelSolution {
    IntVector x;
    IntVector y;
    double leader_obj = 0.0;
    double follower_obj = 0.0;
    SolveStatus status = SolveStatus::infeasible;
};

// Continuous and integer minimizers of one follower problem at a fixed
// leader decision, with objective values and their l2 separation.
struct FollowerResponse {
    Vector u;            // continuous minimizer
    IntVector v;         // tie-broken integer minimizer
    double f_cont = 0.0;
    double f_int = 0.0;
    double distance_l2 = 0.0;
};

struct Violation {
    std::string field;
    std::string rule;
    std::string detail;
};

double leader_objective_quad(const QuadBilevelInstance& inst, const Vector& x, const Vector& y);
double leader_objective_quad(const QuadBilevelInstance& inst, const IntVector& x, const IntVector& y);
double follower_objective_quad(const QuadBilevelInstance& inst, const Vector& x, const Vector& y);
double follower_objective_quad(const QuadBilevelInstance& inst, const IntVector& x, const IntVector& y);

double leader_objective_lin(const LinBilevelInstance& inst, const Vector& x, const Vector& y);
double leader_objective_lin(const LinBilevelInstance& inst, const IntVector& x, const IntVector& y);

std::vector<Violation> validate(const QuadBilevelInstance& inst);
std::vector<Violation> validate(const LinBilevelInstance& inst);

Vector to_real(const IntVector& v);

}  // namespace bilevel
