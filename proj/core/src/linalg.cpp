#include "bilevel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "bilevel/rng.hpp"

namespace bilevel::linalg {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product: dimensions differ");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot: lengths differ");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double norm1(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double norm_inf(const Vector& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

Vector sub(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("sub: lengths differ");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Vector scaled(const Vector& v, double s) {
    Vector r(v);
    for (double& x : r) x *= s;
    return r;
}

bool is_symmetric(const Matrix& q, double rel_tol) {
    if (q.rows() != q.cols()) return false;
    double scale = 0.0;
    for (double x : q.data()) scale = std::max(scale, std::abs(x));
    const double tol = rel_tol * (1.0 + scale);
    for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t j = i + 1; j < q.cols(); ++j)
            if (std::abs(q(i, j) - q(j, i)) > tol) return false;
    return true;
}

bool is_diagonal(const Matrix& q, double tol) {
    if (q.rows() != q.cols()) return false;
    for (std::size_t i = 0; i < q.rows(); ++i)
        for (std::size_t j = 0; j < q.cols(); ++j)
            if (i != j && std::abs(q(i, j)) > tol) return false;
    return true;
}

Matrix cholesky(const Matrix& q) {
    const std::size_t n = q.rows();
    if (n == 0 || q.cols() != n) throw DimensionMismatch("cholesky: matrix must be square");
    if (!is_symmetric(q)) throw DimensionMismatch("cholesky: matrix not symmetric");

    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += q(i, i);
    const double pivot_floor = 1e-12 * (trace / static_cast<double>(n));

    // Build lower L with L L^T = Q, return R = L^T so R^T R = Q.
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = q(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= pivot_floor) throw NotPositiveDefinite("cholesky: pivot below positive-definite floor");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = q(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l.transposed();
}

Vector solve_with_factor(const Matrix& r_upper, const Vector& c) {
    const std::size_t n = r_upper.rows();
    if (c.size() != n) throw DimensionMismatch("solve_with_factor: rhs length differs");
    // Q = R^T R: forward substitution with R^T, then back substitution with R.
    Vector z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = c[i];
        for (std::size_t k = 0; k < i; ++k) s -= r_upper(k, i) * z[k];
        z[i] = s / r_upper(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= r_upper(ii, k) * x[k];
        x[ii] = s / r_upper(ii, ii);
    }
    return x;
}

Vector solve_spd(const Matrix& q, const Vector& c) { return solve_with_factor(cholesky(q), c); }

std::pair<double, double> eigen_extremes(const Matrix& q) {
    const std::size_t n = q.rows();
    if (n == 0 || q.cols() != n) throw DimensionMismatch("eigen_extremes: matrix must be square");
    if (!is_symmetric(q)) throw DimensionMismatch("eigen_extremes: matrix not symmetric");

    Matrix a = q;
    double frob = 0.0;
    for (double x : a.data()) frob += x * x;
    frob = std::sqrt(frob);
    const double off_tol = 1e-12 * (1.0 + frob);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    while (off_norm() > off_tol) {
        if (++sweep > kMaxSweeps) throw NoConvergence("eigen_extremes: Jacobi did not converge in 100 sweeps");
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apq = a(p, r);
                if (apq == 0.0) continue;
                const double theta = (a(r, r) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, r);
                    a(k, p) = c * akp - s * akq;
                    a(k, r) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(r, k);
                    a(p, k) = c * apk - s * aqk;
                    a(r, k) = s * apk + c * aqk;
                }
            }
        }
    }

    double lo = a(0, 0), hi = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) {
        lo = std::min(lo, a(i, i));
        hi = std::max(hi, a(i, i));
    }
    return {hi, lo};
}

Matrix haar_orthogonal(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw DimensionMismatch("haar_orthogonal: dimension must be >= 1");
    rng::Xoshiro256pp gen(seed);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = gen.gaussian();

    // Householder QR; q accumulates the product of reflectors applied to I.
    Matrix q = Matrix::identity(n);
    Matrix r = a;
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += r(i, k) * r(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = r(k, k) >= 0.0 ? -norm : norm;
        Vector v(n, 0.0);
        v[k] = r(k, k) - alpha;
        for (std::size_t i = k + 1; i < n; ++i) v[i] = r(i, k);
        double vtv = 0.0;
        for (std::size_t i = k; i < n; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        const double beta = 2.0 / vtv;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += v[i] * r(i, j);
            s *= beta;
            for (std::size_t i = k; i < n; ++i) r(i, j) -= s * v[i];
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += v[i] * q(j, i);
            s *= beta;
            for (std::size_t i = k; i < n; ++i) q(j, i) -= s * v[i];
        }
    }

    // Sign correction: without it, plain QR is not Haar distributed.
    for (std::size_t j = 0; j < n; ++j) {
        if (r(j, j) < 0.0)
            for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
    }
    return q;
}

namespace {

long long laplace_det(const std::vector<long long>& m, std::size_t k) {
    if (k == 1) return m[0];
    if (k == 2) return m[0] * m[3] - m[1] * m[2];
    long long det = 0;
    std::vector<long long> minor((k - 1) * (k - 1));
    for (std::size_t j = 0; j < k; ++j) {
        if (m[j] != 0) {
            std::size_t idx = 0;
            for (std::size_t r = 1; r < k; ++r)
                for (std::size_t c = 0; c < k; ++c)
                    if (c != j) minor[idx++] = m[r * k + c];
            const long long term = m[j] * laplace_det(minor, k - 1);
            det += (j % 2 == 0) ? term : -term;
        }
    }
    return det;
}

void enumerate_subsets(std::size_t total, std::size_t pick, std::vector<std::size_t>& current,
                       std::size_t start, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    if (current.size() == pick) {
        fn(current);
        return;
    }
    for (std::size_t i = start; i < total; ++i) {
        current.push_back(i);
        enumerate_subsets(total, pick, current, i + 1, fn);
        current.pop_back();
    }
}

}  // namespace

long long max_abs_subdeterminant(const Matrix& d) {
    const std::size_t rows = d.rows(), cols = d.cols();
    if (rows == 0 || cols == 0) return 0;
    const std::size_t dim = std::min(rows, cols);
    if (dim > 8) throw DimensionTooLarge("max_abs_subdeterminant: min dimension exceeds guard of 8");

    std::vector<long long> entries(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const double x = d(i, j);
            const double rounded = std::nearbyint(x);
            if (std::abs(x - rounded) > 1e-9) throw DimensionMismatch("max_abs_subdeterminant: entry not integral");
            entries[i * cols + j] = static_cast<long long>(rounded);
        }

    long long best = 0;
    std::vector<long long> sub;
    for (std::size_t k = 1; k <= dim; ++k) {
        sub.resize(k * k);
        std::vector<std::size_t> rsel;
        enumerate_subsets(rows, k, rsel, 0, [&](const std::vector<std::size_t>& rset) {
            std::vector<std::size_t> csel;
            enumerate_subsets(cols, k, csel, 0, [&](const std::vector<std::size_t>& cset) {
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b) sub[a * k + b] = entries[rset[a] * cols + cset[b]];
                best = std::max(best, std::abs(laplace_det(sub, k)));
            });
        });
    }
    return best;
}

}  // namespace bilevel::linalg
