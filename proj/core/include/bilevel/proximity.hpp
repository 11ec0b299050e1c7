#pragma once

#include <string>

#include "bilevel/linalg.hpp"

namespace bilevel {

using linalg::Matrix;
using linalg::Vector;

enum class ProxSource { quad_general, quad_diagonal, cook_l_inf, ew_l1 };

// Bundle of the quantities a gap certificate is assembled from.
struct ProximityBounds {
    double flatness = 0.0;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    double prox_l2 = 0.0;
    ProxSource source = ProxSource::quad_general;
};

// Flatness surrogate Flt(n) = n^(5/2). Always a valid upper bound; the
// sharper asymptotic estimates carry no explicit constant and are exposed
// only informally (see flatness_asymptotic_estimate).
double flatness_bound(std::size_t n);

// Informational only, never used in certificates: n log^3(2n).
double flatness_asymptotic_estimate(std::size_t n);

// l2 proximity bound (Flt(n)/4) sqrt(lambda_max/lambda_min) for SPD Q.
double prox_bound_quad(const Matrix& q);
ProximityBounds prox_bounds_quad(const Matrix& q);

// Exact l2 proximity sqrt(n)/2 of any diagonal positive definite matrix.
double prox_diagonal(std::size_t n);

// Closed-form max of p^T x over the ellipsoid x^T Q x <= gamma.
double ellipsoid_linear_max(const Matrix& q, const Vector& p, double gamma);

// Bound on max p^T (u - v) over continuous/integer minimizer pairs:
// Flt(n) sqrt(lambda_max) / (4 sqrt(2) ||R^-T p||) * p^T Q^-1 p.
double prox_linear_term_bound(const Matrix& q, const Vector& p);

// l_inf proximity bound n * Delta(D) for integer-linear programs.
double cook_prox_bound(std::size_t n, long long delta_max_subdet);

// l1 proximity bound m * (2 m delta + 1)^m.
double ew_prox_bound(std::size_t m, long long delta_max_entry);

// Exact max ||u - v||_2 over all integer global minimizers v of
// 1/2 y^T Q y + d^T y, found by exhaustive search of the certified
// level-set box (optionally widened to box_radius per coordinate).
// Restricted to n <= 3 and boxes of at most 1e5 lattice points.
double measure_prox_bruteforce(const Matrix& q, const Vector& d, long long box_radius);

}  // namespace bilevel
