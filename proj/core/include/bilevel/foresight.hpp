#pragma once

#include "bilevel/model.hpp"
#include "bilevel/oracles.hpp"
#include "bilevel/proximity.hpp"

namespace bilevel {

// Additive gap bounds attached to an approximate solution. ex_ante is
// computable from the instance alone; ex_post also uses the realized
// distance between the integer response and the relaxed response.
struct GapCertificate {
    double L2 = 0.0;           // Lipschitz constant of the leader's follower term
    double prox_used = 0.0;    // proximity bound fed into the guarantees
    double ex_ante = 0.0;      // 2 L2 prox
    double ex_post = 0.0;      // L2 (prox + ||y - y_hat||)
    double linear_case = 0.0;  // sharper bound for linear leader terms (quad family)
    bool has_linear_case = false;
    double lin_l_inf = 0.0;    // 2 ||d||_1 n Delta(D)   (linear family)
    double lin_l1 = 0.0;       // 2 ||d||_inf m (2 m delta + 1)^m
};

struct ApproxResult {
    BilevelSolution solution;
    IntVector frv_leader;        // x decided on the relaxed follower
    Vector frv_follower_cont;    // continuous follower response to it
    GapCertificate certificate;
    double frv_seconds = 0.0;
    double follower_seconds = 0.0;
};

// Relaxed Foresight for the quadratic family: solve the follower-relaxed
// version by substituting y(x) = -Q^-1 (C x + d_y) into the leader
// objective, freeze the leader decision, then answer the true integer
// follower with a sense-driven tie break.
ApproxResult relaxed_foresight_quad(const QuadBilevelInstance& inst);

// Relaxed Foresight for the integer-linear family: the relaxed follower is
// scanned as one LP per feasible leader point (misalignment collapses the
// bilevel FRV to this), then the frozen leader gets an exact ILP response.
ApproxResult relaxed_foresight_lin(const LinBilevelInstance& inst);

double certify_ex_ante(double l2, double prox);
double certify_linear_case(const Matrix& q, const Vector& d_x);
double compose_apx_bound(double f_om, double alpha, double beta, double l2, double prox);

}  // namespace bilevel
