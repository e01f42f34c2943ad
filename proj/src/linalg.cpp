#include "fraclab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fraclab {

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    return m;
}

double DenseMatrix::frobenius() const {
    double s = 0.0;
    for (double x : a_) s += x * x;
    return std::sqrt(s);
}

double DenseMatrix::symmetry_defect() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("linalg: matrix dimension mismatch");
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

namespace {

double offdiag_frobenius(const DenseMatrix& s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = i + 1; j < s.cols(); ++j) sum += 2.0 * s(i, j) * s(i, j);
    return std::sqrt(sum);
}

}  // namespace

EigResult jacobi_eigensymmetric(DenseMatrix s) {
    const std::size_t n = s.rows();
    if (n != s.cols()) throw std::invalid_argument("jacobi: matrix not square");
    const double scale = std::max(s.max_abs(), 1e-300);
    if (s.symmetry_defect() > 1e-12 * scale)
        throw std::invalid_argument("jacobi: matrix not symmetric");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double m = 0.5 * (s(i, j) + s(j, i));
            s(i, j) = s(j, i) = m;
        }

    DenseMatrix v = DenseMatrix::identity(n);
    const double fro = std::max(s.frobenius(), 1e-300);
    const double target = 1e-11 * fro;

    for (int sweep = 0; sweep < 100; ++sweep) {
        if (offdiag_frobenius(s) <= target) break;
        if (sweep == 99) throw std::runtime_error("jacobi: no convergence in 100 sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                const double tau = sn / (1.0 + c);

                const double app = s(p, p), aqq = s(q, q);
                s(p, p) = app - t * apq;
                s(q, q) = aqq + t * apq;
                s(p, q) = s(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = s(k, p), akq = s(k, q);
                    s(k, p) = akp - sn * (akq + tau * akp);
                    s(p, k) = s(k, p);
                    s(k, q) = akq + sn * (akp - tau * akq);
                    s(q, k) = s(k, q);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp - sn * (vkq + tau * vkp);
                    v(k, q) = vkq + sn * (vkp - tau * vkq);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return s(a, a) < s(b, b); });

    EigResult out;
    out.values.resize(n);
    out.vectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = s(src, src);
        // sign convention: largest-magnitude entry positive, for reproducible output
        std::size_t imax = 0;
        double vmax = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(v(i, src)) > vmax) { vmax = std::abs(v(i, src)); imax = i; }
        const double sgn = v(imax, src) >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = sgn * v(i, src);
    }
    return out;
}

SvdResult svd_one_sided(DenseMatrix b) {
    const std::size_t m = b.rows(), n = b.cols();
    DenseMatrix v = DenseMatrix::identity(n);

    // column-major copy so rotations touch contiguous memory
    std::vector<double> col(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) col[j * m + i] = b(i, j);
    auto cdot = [&](std::size_t p, std::size_t q) {
        const double* cp = col.data() + p * m;
        const double* cq = col.data() + q * m;
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += cp[i] * cq[i];
        return s;
    };

    const double eps = 1e-15;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = cdot(p, p), beta = cdot(q, q), gamma = cdot(p, q);
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = c * t;
                double* cp = col.data() + p * m;
                double* cq = col.data() + q * m;
                for (std::size_t i = 0; i < m; ++i) {
                    const double x = cp[i], y = cq[i];
                    cp[i] = c * x - sn * y;
                    cq[i] = sn * x + c * y;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double x = v(i, p), y = v(i, q);
                    v(i, p) = c * x - sn * y;
                    v(i, q) = sn * x + c * y;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += col[j * m + i] * col[j * m + i];
        sig[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sig[a] > sig[b]; });

    SvdResult out;
    out.sigma.resize(n);
    out.u = DenseMatrix(m, n);
    out.v = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.sigma[j] = sig[src];
        const double inv = sig[src] > 0.0 ? 1.0 / sig[src] : 0.0;
        for (std::size_t i = 0; i < m; ++i) out.u(i, j) = col[src * m + i] * inv;
        for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
    }
    return out;
}

BandedCholesky::BandedCholesky(const DenseMatrix& a, std::size_t kd)
    : n_(a.rows()), kd_(kd), band_((kd + 1) * a.rows(), 0.0) {
    if (a.rows() != a.cols()) throw std::invalid_argument("banded cholesky: not square");
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k <= kd_ && i + k < n_; ++k) at(k, i) = a(i + k, i);

    // in-place banded LL^T
    for (std::size_t j = 0; j < n_; ++j) {
        double d = at(0, j);
        if (d <= 0.0) throw std::runtime_error("banded cholesky: matrix not positive definite");
        d = std::sqrt(d);
        at(0, j) = d;
        for (std::size_t k = 1; k <= kd_ && j + k < n_; ++k) at(k, j) /= d;
        for (std::size_t k = 1; k <= kd_ && j + k < n_; ++k) {
            const double ljk = at(k, j);
            for (std::size_t m = k; m <= kd_ && j + m < n_; ++m)
                at(m - k, j + k) -= ljk * at(m, j);
        }
    }
}

std::vector<double> BandedCholesky::solve(std::vector<double> rhs) const {
    if (rhs.size() != n_) throw std::invalid_argument("banded cholesky: rhs size mismatch");
    for (std::size_t j = 0; j < n_; ++j) {
        rhs[j] /= at(0, j);
        for (std::size_t k = 1; k <= kd_ && j + k < n_; ++k) rhs[j + k] -= at(k, j) * rhs[j];
    }
    for (std::size_t jj = n_; jj-- > 0;) {
        for (std::size_t k = 1; k <= kd_ && jj + k < n_; ++k) rhs[jj] -= at(k, jj) * rhs[jj + k];
        rhs[jj] /= at(0, jj);
    }
    return rhs;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need two samples or more");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    if (sxx <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.correlation = syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
    return f;
}

}  // namespace fraclab
