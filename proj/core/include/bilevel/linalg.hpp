#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "bilevel/errors.hpp"

namespace bilevel::linalg {

using Vector = std::vector<double>;

// Dense row-major matrix. Everything in this project is desk scale
// (n <= ~30), so there is no attempt at blocking or sparsity.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transposed() const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double norm1(const Vector& v);
double norm_inf(const Vector& v);
Vector sub(const Vector& a, const Vector& b);
Vector scaled(const Vector& v, double s);

bool is_symmetric(const Matrix& q, double rel_tol = 1e-9);
bool is_diagonal(const Matrix& q, double tol = 0.0);

// Upper-triangular factor R with R^T R = Q. Rejects non-SPD input when a
// pivot falls at or below 1e-12 * (trace/n).
Matrix cholesky(const Matrix& q);

// Solves Q x = c for SPD Q via the Cholesky factor.
Vector solve_spd(const Matrix& q, const Vector& c);
Vector solve_with_factor(const Matrix& r_upper, const Vector& c);

// (lambda_max, lambda_min) of a symmetric matrix by cyclic Jacobi sweeps.
std::pair<double, double> eigen_extremes(const Matrix& q);

// Haar-distributed random orthogonal matrix: Gaussian fill, Householder QR,
// column signs corrected by the sign of the corresponding R diagonal.
Matrix haar_orthogonal(std::size_t n, std::uint64_t seed);

// Exact max |det| over all square submatrices of an integer matrix.
// Guarded at min(rows, cols) <= 8; Laplace expansion in 64-bit integers.
long long max_abs_subdeterminant(const Matrix& d);

}  // namespace bilevel::linalg
