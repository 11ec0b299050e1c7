#pragma once

// Shared helpers for the test suites: worked example instances and the
// independent numerical oracles (lattice enumeration, projected gradient)
// that the library results are checked against. Everything here stays off
// the library's own solve paths on purpose.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

#include "bilevel/model.hpp"
#include "bilevel/rng.hpp"

namespace testsupport {

using bilevel::IntVector;
using bilevel::Matrix;
using bilevel::QuadBilevelInstance;
using bilevel::Sense;
using bilevel::Vector;

inline Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

// Worked example: leader min 100(x-1)^2 + y over integer x, follower
// argmin y^2 - x y. Over binary leaders the square linearizes exactly to
// -100 x1 + 100 x2 with x2 pinned to one; the integer leader optimum x=1
// is preserved because any other integer x costs at least 100.
inline QuadBilevelInstance example1(Sense sense) {
    QuadBilevelInstance inst;
    inst.n_x = 2;
    inst.n_y = 1;
    inst.h_x = {-100.0, 100.0};
    inst.d_x = {1.0};
    inst.A = Matrix(1, 2);
    inst.A(0, 1) = -1.0;  // -x2 <= -1 pins x2 = 1
    inst.b = {-1.0};
    inst.Q_y = Matrix::diagonal({2.0});
    inst.C_y = Matrix(1, 2);
    inst.C_y(0, 0) = -1.0;
    inst.d_y = {0.0};
    inst.sense = sense;
    return inst;
}

// Worked example: leader min 1000 x^2 + y, follower argmin (3y-t)^2 + x y,
// encoded up to the additive constant t^2 which moves no argmin.
inline QuadBilevelInstance example2(double target) {
    QuadBilevelInstance inst;
    inst.n_x = 1;
    inst.n_y = 1;
    inst.h_x = {1000.0};
    inst.d_x = {1.0};
    inst.A = Matrix(0, 1);
    inst.b = {};
    inst.Q_y = Matrix::diagonal({18.0});
    inst.C_y = Matrix(1, 1);
    inst.C_y(0, 0) = 1.0;
    inst.d_y = {-6.0 * target};
    inst.sense = Sense::optimistic;
    return inst;
}

inline double f_quad(const Matrix& q, const Vector& c, const std::vector<long long>& y) {
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        lin += c[i] * static_cast<double>(y[i]);
        for (std::size_t j = 0; j < y.size(); ++j)
            quad += q(i, j) * static_cast<double>(y[i]) * static_cast<double>(y[j]);
    }
    return 0.5 * quad + lin;
}

// Exhaustive lattice oracle for min 1/2 y^T Q y + c^T y over Z^n. Builds
// its own inverse by Gauss-Jordan and enumerates the level-set box.
struct LatticeOracle {
    Matrix inv;
    Vector u;
    std::vector<long long> lo, hi;

    LatticeOracle(const Matrix& q, const Vector& c) {
        const std::size_t n = q.rows();
        std::vector<std::vector<double>> aug(n, std::vector<double>(2 * n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) aug[i][j] = q(i, j);
            aug[i][n + i] = 1.0;
        }
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            for (std::size_t r2 = col + 1; r2 < n; ++r2)
                if (std::abs(aug[r2][col]) > std::abs(aug[piv][col])) piv = r2;
            std::swap(aug[col], aug[piv]);
            const double p = aug[col][col];
            for (double& v : aug[col]) v /= p;
            for (std::size_t r2 = 0; r2 < n; ++r2) {
                if (r2 == col) continue;
                const double f = aug[r2][col];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < 2 * n; ++j) aug[r2][j] -= f * aug[col][j];
            }
        }
        inv = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug[i][n + j];
        u.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) u[i] -= inv(i, j) * c[j];

        double f_u = 0.0;
        {
            double quad = 0.0, lin = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                lin += c[i] * u[i];
                for (std::size_t j = 0; j < n; ++j) quad += q(i, j) * u[i] * u[j];
            }
            f_u = 0.5 * quad + lin;
        }
        std::vector<long long> v0(n);
        for (std::size_t i = 0; i < n; ++i) v0[i] = std::llround(u[i]);
        const double delta = std::max(0.0, f_quad(q, c, v0) - f_u) + 1e-9;
        lo.resize(n);
        hi.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double h = std::sqrt(2.0 * delta * std::max(0.0, inv(i, i))) + 1e-9;
            lo[i] = std::min(v0[i], static_cast<long long>(std::ceil(u[i] - h)));
            hi[i] = std::max(v0[i], static_cast<long long>(std::floor(u[i] + h)));
        }
    }

    double min_value(const Matrix& q, const Vector& c) const {
        std::vector<long long> y(lo);
        double best = f_quad(q, c, y);
        auto advance = [&]() {
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (y[i] < hi[i]) {
                    ++y[i];
                    return true;
                }
                y[i] = lo[i];
            }
            return false;
        };
        while (advance()) best = std::min(best, f_quad(q, c, y));
        return best;
    }
};

// Independent ellipsoid maximizer: projected gradient ascent with exact
// Euclidean projection onto {x : x^T Q x <= gamma} via bisection on the
// shifted system x = (I + mu Q)^-1 z.
inline double ellipsoid_max_pg(const Matrix& q, const Vector& p, double gamma) {
    const std::size_t n = p.size();
    auto quad_of = [&](const Vector& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s += x[i] * q(i, j) * x[j];
        return s;
    };
    auto solve_shifted = [&](double mu, const Vector& z) {
        std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) a[i][j] = mu * q(i, j) + (i == j ? 1.0 : 0.0);
            a[i][n] = z[i];
        }
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            for (std::size_t r2 = col + 1; r2 < n; ++r2)
                if (std::abs(a[r2][col]) > std::abs(a[piv][col])) piv = r2;
            std::swap(a[col], a[piv]);
            for (std::size_t r2 = 0; r2 < n; ++r2) {
                if (r2 == col) continue;
                const double f = a[r2][col] / a[col][col];
                for (std::size_t j = col; j <= n; ++j) a[r2][j] -= f * a[col][j];
            }
        }
        Vector x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
        return x;
    };
    auto project = [&](const Vector& z) {
        if (quad_of(z) <= gamma) return z;
        double lo = 0.0, hi = 1.0;
        while (quad_of(solve_shifted(hi, z)) > gamma) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (quad_of(solve_shifted(mid, z)) > gamma) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return solve_shifted(hi, z);
    };

    Vector x(n, 0.0);
    double best = 0.0;
    for (int it = 0; it < 4000; ++it) {
        for (std::size_t i = 0; i < n; ++i) x[i] += 0.5 * p[i];
        x = project(x);
        double val = 0.0;
        for (std::size_t i = 0; i < n; ++i) val += p[i] * x[i];
        best = std::max(best, val);
    }
    return best;
}

inline Matrix random_spd(std::size_t n, bilevel::rng::Xoshiro256pp& gen) {
    Matrix r(n, n);
    for (double& v : r.data()) v = gen.gaussian();
    Matrix q = r.transposed() * r;
    for (std::size_t i = 0; i < n; ++i) q(i, i) += 0.5 + gen.next_double();
    return q;
}

}  // namespace testsupport
