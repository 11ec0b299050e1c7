#include "bilevel/proximity.hpp"

#include <algorithm>
#include <cmath>

#include "bilevel/errors.hpp"

namespace bilevel {

using linalg::cholesky;
using linalg::dot;
using linalg::eigen_extremes;
using linalg::solve_with_factor;

double flatness_bound(std::size_t n) {
    if (n == 0) throw DimensionMismatch("flatness_bound: dimension must be >= 1");
    return std::pow(static_cast<double>(n), 2.5);
}

double flatness_asymptotic_estimate(std::size_t n) {
    if (n == 0) throw DimensionMismatch("flatness_asymptotic_estimate: dimension must be >= 1");
    const double nn = static_cast<double>(n);
    const double lg = std::log(2.0 * nn);
    return nn * lg * lg * lg;
}

ProximityBounds prox_bounds_quad(const Matrix& q) {
    cholesky(q);  // SPD gate
    ProximityBounds b;
    const auto [hi, lo] = eigen_extremes(q);
    b.lambda_max = hi;
    b.lambda_min = lo;
    b.flatness = flatness_bound(q.rows());
    if (linalg::is_diagonal(q)) {
        b.source = ProxSource::quad_diagonal;
        b.prox_l2 = prox_diagonal(q.rows());
    } else {
        b.source = ProxSource::quad_general;
        b.prox_l2 = (b.flatness / 4.0) * std::sqrt(hi / lo);
    }
    return b;
}

double prox_bound_quad(const Matrix& q) {
    cholesky(q);  // SPD gate
    const auto [hi, lo] = eigen_extremes(q);
    return (flatness_bound(q.rows()) / 4.0) * std::sqrt(hi / lo);
}

double prox_diagonal(std::size_t n) {
    if (n == 0) throw DimensionMismatch("prox_diagonal: dimension must be >= 1");
    return std::sqrt(static_cast<double>(n)) / 2.0;
}

double ellipsoid_linear_max(const Matrix& q, const Vector& p, double gamma) {
    if (gamma < 0.0) throw DimensionMismatch("ellipsoid_linear_max: gamma must be >= 0");
    const Matrix r = cholesky(q);
    if (p.size() != q.rows()) throw DimensionMismatch("ellipsoid_linear_max: p length differs from Q");
    // p^T Q^-1 p = ||R^-T p||^2, so the closed form collapses to
    // sqrt(gamma * p^T Q^-1 p); this also covers p = 0.
    const Vector qinv_p = solve_with_factor(r, p);
    const double quad = std::max(0.0, dot(p, qinv_p));
    return std::sqrt(gamma * quad);
}

double prox_linear_term_bound(const Matrix& q, const Vector& p) {
    const Matrix r = cholesky(q);
    if (p.size() != q.rows()) throw DimensionMismatch("prox_linear_term_bound: p length differs from Q");
    if (linalg::norm2(p) == 0.0) throw ZeroVector("prox_linear_term_bound: p must be nonzero");
    const auto [lambda_max, lambda_min] = eigen_extremes(q);
    (void)lambda_min;
    const Vector qinv_p = solve_with_factor(r, p);
    const double quad = dot(p, qinv_p);            // p^T Q^-1 p
    const double rtp_norm = std::sqrt(quad);       // ||R^-T p||
    return flatness_bound(q.rows()) * std::sqrt(lambda_max) / (4.0 * std::sqrt(2.0) * rtp_norm) * quad;
}

double cook_prox_bound(std::size_t n, long long delta_max_subdet) {
    if (n == 0) throw DimensionMismatch("cook_prox_bound: dimension must be >= 1");
    if (delta_max_subdet < 0) throw DimensionMismatch("cook_prox_bound: Delta must be >= 0");
    return static_cast<double>(n) * static_cast<double>(delta_max_subdet);
}

double ew_prox_bound(std::size_t m, long long delta_max_entry) {
    if (m == 0) throw DimensionMismatch("ew_prox_bound: constraint count must be >= 1");
    if (delta_max_entry < 0) throw DimensionMismatch("ew_prox_bound: delta must be >= 0");
    const double md = static_cast<double>(m);
    return md * std::pow(2.0 * md * static_cast<double>(delta_max_entry) + 1.0, md);
}

double measure_prox_bruteforce(const Matrix& q, const Vector& d, long long box_radius) {
    const std::size_t n = q.rows();
    if (n == 0 || n > 3) throw DimensionTooLarge("measure_prox_bruteforce: restricted to n <= 3");
    if (d.size() != n) throw DimensionMismatch("measure_prox_bruteforce: d length differs from Q");

    const Matrix r = cholesky(q);
    Vector neg_d(n);
    for (std::size_t i = 0; i < n; ++i) neg_d[i] = -d[i];
    const Vector u = solve_with_factor(r, neg_d);

    auto f_at = [&](const std::vector<long long>& y) {
        double quad = 0.0, lin = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = static_cast<double>(y[i]);
            lin += d[i] * yi;
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) row += q(i, j) * static_cast<double>(y[j]);
            quad += yi * row;
        }
        return 0.5 * quad + lin;
    };
    const Vector qu = q * u;
    const double f_u = 0.5 * dot(u, qu) + dot(d, u);

    std::vector<long long> v0(n);
    for (std::size_t i = 0; i < n; ++i) v0[i] = std::llround(u[i]);
    const double delta_f = std::max(0.0, f_at(v0) - f_u) + 1e-12;

    // Certified per-coordinate ranges from the level set; box_radius can
    // only widen them.
    Vector e(n, 0.0);
    std::vector<long long> lo(n), hi(n);
    double count = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = 1.0;
        const Vector col = solve_with_factor(r, e);
        e[i] = 0.0;
        double h = std::sqrt(2.0 * delta_f * std::max(0.0, col[i])) + 1e-9;
        h = std::max(h, static_cast<double>(box_radius));
        lo[i] = std::min<long long>(static_cast<long long>(std::ceil(u[i] - h)), v0[i]);
        hi[i] = std::max<long long>(static_cast<long long>(std::floor(u[i] + h)), v0[i]);
        count *= static_cast<double>(hi[i] - lo[i] + 1);
    }
    if (count > 1e5) throw SearchRegionOverflow("measure_prox_bruteforce: certified box exceeds 1e5 points");

    bool integral = true;
    for (double x : q.data())
        if (x != std::nearbyint(x)) integral = false;
    for (double x : d)
        if (x != std::nearbyint(x)) integral = false;

    // Pass 1: global integer minimum over the box.
    std::vector<long long> y(lo);
    double f_min = f_at(y);
    auto advance = [&]() {
        for (std::size_t i = 0; i < n; ++i) {
            if (y[i] < hi[i]) {
                ++y[i];
                return true;
            }
            y[i] = lo[i];
        }
        return false;
    };
    while (advance()) f_min = std::min(f_min, f_at(y));

    const double tie_tol = integral ? 0.0 : 1e-9 * (1.0 + std::abs(f_min));

    // Pass 2: farthest minimizer from u.
    double worst = 0.0;
    y.assign(lo.begin(), lo.end());
    bool more = true;
    while (more) {
        if (f_at(y) <= f_min + tie_tol) {
            double dist2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double diff = u[i] - static_cast<double>(y[i]);
                dist2 += diff * diff;
            }
            worst = std::max(worst, std::sqrt(dist2));
        }
        more = advance();
    }
    return worst;
}

}  // namespace bilevel
