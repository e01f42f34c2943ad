#pragma once

#include <cstddef>
#include <vector>

namespace fraclab {

/// Dense row-major matrix. Small and deliberately plain: everything at desk
/// scale fits comfortably in memory, so no sparse formats.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }

    double* row(std::size_t i) { return a_.data() + i * cols_; }
    const double* row(std::size_t i) const { return a_.data() + i * cols_; }

    double max_abs() const;
    double frobenius() const;
    double symmetry_defect() const;  // max |A - A^T|

    static DenseMatrix identity(std::size_t n);

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

struct EigResult {
    std::vector<double> values;  // ascending
    DenseMatrix vectors;         // column k is the eigenvector of values[k]
};

/// Cyclic Jacobi rotations on a symmetric matrix. Iterates until the
/// off-diagonal Frobenius norm drops below 1e-11 * ||S||_F. Input must be
/// symmetric within 1e-12 relative; it is exactly symmetrized before sweeping.
EigResult jacobi_eigensymmetric(DenseMatrix s);

struct SvdResult {
    std::vector<double> sigma;  // nonincreasing
    DenseMatrix u;              // m x r, orthonormal columns (zero columns for rank collapse)
    DenseMatrix v;              // n x r, orthonormal columns
};

/// One-sided Jacobi SVD. Keeps small singular values to much better relative
/// accuracy than the normal-equations route, which the tests use as an oracle.
SvdResult svd_one_sided(DenseMatrix b);

/// Symmetric positive definite banded Cholesky (lower band storage,
/// band[k][i] = A(i+k, i), k = 0..kd). Throws if a pivot is not positive.
class BandedCholesky {
public:
    BandedCholesky(const DenseMatrix& a, std::size_t kd);  // takes the full matrix, extracts band
    std::vector<double> solve(std::vector<double> rhs) const;

private:
    std::size_t n_, kd_;
    std::vector<double> band_;  // (kd+1) x n, row-major by diagonal offset
    double& at(std::size_t k, std::size_t i) { return band_[k * n_ + i]; }
    double at(std::size_t k, std::size_t i) const { return band_[k * n_ + i]; }
};

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm2(const std::vector<double>& a);

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double correlation = 0.0;
};

/// Least squares fit y = intercept + slope * x with the Pearson correlation.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fraclab
