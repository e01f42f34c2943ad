#include "fraclab/eigenbasis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fraclab {

double EigenBasis::sobolev_weight(int k, double r) const {
    const double lam = values[k];
    return torus() ? std::pow(1.0 + lam, r) : std::pow(lam, r);
}

ScalarField EigenBasis::field(int k) const {
    ScalarField f(geom);
    for (int i = 0; i < geom.node_count(); ++i) f.v[i] = vectors(i, k);
    return f;
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void nyquist_guard(int wanted, int n_axis) {
    if (wanted > n_axis / 4)
        throw std::invalid_argument("analytic_basis: mode count exceeds n_nodes/4 Nyquist guard");
}

EigenBasis analytic_interval(const Geometry& g, int count) {
    nyquist_guard(count, g.n_nodes[0]);
    const double l = g.extent[0];
    const int n = g.n_nodes[0];
    EigenBasis b;
    b.geom = g;
    b.mode = BasisMode::analytic;
    b.values.resize(count);
    b.vectors = DenseMatrix(n, count);
    const double amp = std::sqrt(2.0 / l);
    for (int k = 1; k <= count; ++k) {
        b.values[k - 1] = (k * kPi / l) * (k * kPi / l);
        for (int i = 0; i < n; ++i)
            b.vectors(i, k - 1) = amp * std::sin(k * kPi * g.coord(0, i) / l);
    }
    return b;
}

EigenBasis analytic_rectangle(const Geometry& g, int count) {
    const int kx = g.n_nodes[0] / 4, ky = g.n_nodes[1] / 4;
    if (count > kx * ky)
        throw std::invalid_argument("analytic_basis: mode count exceeds Nyquist-resolvable modes");
    struct Mode { double lam; int k, l; };
    std::vector<Mode> modes;
    modes.reserve(kx * ky);
    const double lx = g.extent[0], ly = g.extent[1];
    for (int k = 1; k <= kx; ++k)
        for (int l = 1; l <= ky; ++l)
            modes.push_back({std::pow(k * kPi / lx, 2) + std::pow(l * kPi / ly, 2), k, l});
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.lam != b.lam) return a.lam < b.lam;
        if (a.k != b.k) return a.k < b.k;
        return a.l < b.l;
    });
    EigenBasis b;
    b.geom = g;
    b.mode = BasisMode::analytic;
    b.values.resize(count);
    b.vectors = DenseMatrix(g.node_count(), count);
    const double amp = 2.0 / std::sqrt(lx * ly);
    const int nx = g.n_nodes[0], ny = g.n_nodes[1];
    for (int m = 0; m < count; ++m) {
        b.values[m] = modes[m].lam;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                b.vectors(j * nx + i, m) = amp * std::sin(modes[m].k * kPi * g.coord(0, i) / lx) *
                                           std::sin(modes[m].l * kPi * g.coord(1, j) / ly);
    }
    return b;
}

EigenBasis analytic_circle(const Geometry& g, int count, bool mean_zero) {
    nyquist_guard(count, g.n_nodes[0]);
    const double l = g.extent[0];
    const int n = g.n_nodes[0];
    EigenBasis b;
    b.geom = g;
    b.mode = BasisMode::analytic;
    b.mean_zero = mean_zero;
    b.values.reserve(count);
    b.vectors = DenseMatrix(n, count);
    int col = 0;
    if (!mean_zero) {
        b.values.push_back(0.0);
        for (int i = 0; i < n; ++i) b.vectors(i, col) = 1.0 / std::sqrt(l);
        ++col;
    }
    const double amp = std::sqrt(2.0 / l);
    for (int m = 1; col < count; ++m) {
        const double lam = std::pow(2.0 * kPi * m / l, 2);
        b.values.push_back(lam);
        for (int i = 0; i < n; ++i)
            b.vectors(i, col) = amp * std::cos(2.0 * kPi * m * g.coord(0, i) / l);
        ++col;
        if (col >= count) break;
        b.values.push_back(lam);
        for (int i = 0; i < n; ++i)
            b.vectors(i, col) = amp * std::sin(2.0 * kPi * m * g.coord(0, i) / l);
        ++col;
    }
    return b;
}

}  // namespace

EigenBasis analytic_basis(const Geometry& g, int count, bool mean_zero) {
    if (count < 1) throw std::invalid_argument("analytic_basis: count >= 1 required");
    switch (g.kind) {
        case GeomKind::interval: return analytic_interval(g, count);
        case GeomKind::rectangle: return analytic_rectangle(g, count);
        case GeomKind::circle: return analytic_circle(g, count, mean_zero);
    }
    throw std::logic_error("analytic_basis: unknown geometry kind");
}

namespace {

DenseMatrix stiffness_1d(const Metric& m) {
    const Geometry& g = m.geom;
    const int n = g.n_nodes[0];
    const double h = g.h(0);
    const double inv_h2 = 1.0 / (h * h);
    DenseMatrix s(n, n);
    const bool periodic = g.boundary() == BoundaryKind::periodic;
    for (int i = 0; i + 1 < n; ++i) {
        const double af = 0.5 * (m.a[i] + m.a[i + 1]);
        s(i, i) += af * inv_h2;
        s(i + 1, i + 1) += af * inv_h2;
        s(i, i + 1) -= af * inv_h2;
        s(i + 1, i) -= af * inv_h2;
    }
    if (periodic) {
        const double af = 0.5 * (m.a[n - 1] + m.a[0]);
        s(n - 1, n - 1) += af * inv_h2;
        s(0, 0) += af * inv_h2;
        s(0, n - 1) -= af * inv_h2;
        s(n - 1, 0) -= af * inv_h2;
    } else {
        // boundary faces: Dirichlet value at the face, half-cell distance
        s(0, 0) += 2.0 * m.a[0] * inv_h2;
        s(n - 1, n - 1) += 2.0 * m.a[n - 1] * inv_h2;
    }
    return s;
}

DenseMatrix stiffness_2d(const Metric& m) {
    const Geometry& g = m.geom;
    const int nx = g.n_nodes[0], ny = g.n_nodes[1];
    const int n = nx * ny;
    const double hx = g.h(0), hy = g.h(1);
    const double vol = hx * hy;
    DenseMatrix e(n, n);  // bilinear-form matrix, divided by cell volume at the end
    auto idx = [&](int i, int j) { return j * nx + i; };
    auto a_at = [&](int i, int j) { return m.tensor_at(idx(i, j)); };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int p = idx(i, j);
            // x-faces to the right
            if (i + 1 < nx) {
                const double af = 0.5 * (a_at(i, j)[0] + a_at(i + 1, j)[0]);
                const double w = af * hy / hx;
                const int q = idx(i + 1, j);
                e(p, p) += w; e(q, q) += w; e(p, q) -= w; e(q, p) -= w;
            }
            // y-faces upward
            if (j + 1 < ny) {
                const double af = 0.5 * (a_at(i, j)[2] + a_at(i, j + 1)[2]);
                const double w = af * hx / hy;
                const int q = idx(i, j + 1);
                e(p, p) += w; e(q, q) += w; e(p, q) -= w; e(q, p) -= w;
            }
            // Dirichlet boundary faces (half-cell distance)
            if (i == 0) e(p, p) += 2.0 * a_at(i, j)[0] * hy / hx;
            if (i == nx - 1) e(p, p) += 2.0 * a_at(i, j)[0] * hy / hx;
            if (j == 0) e(p, p) += 2.0 * a_at(i, j)[2] * hx / hy;
            if (j == ny - 1) e(p, p) += 2.0 * a_at(i, j)[2] * hx / hy;
        }
    }

    // mixed terms: Dx^T diag(a12 vol) Dy, symmetrized; centered differences
    // with zero ghosts are exactly antisymmetric so the sum stays symmetric
    auto add_cross = [&](int pi, int pj, double ci, int qi, int qj, double cj, double a12) {
        // contribution a12 * vol * (Dx u)(Dy v) expanded into node pairs
        e(idx(pi, pj), idx(qi, qj)) += a12 * vol * ci * cj;
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double a12 = a_at(i, j)[1];
            if (a12 == 0.0) continue;
            const double cx = 1.0 / (2.0 * hx), cy = 1.0 / (2.0 * hy);
            // (Dx u)(n) (Dy v)(n) + (Dy u)(n)(Dx v)(n); ghosts outside are zero
            const int xs[2] = {i - 1, i + 1};
            const double xc[2] = {-cx, cx};
            const int ys[2] = {j - 1, j + 1};
            const double yc[2] = {-cy, cy};
            for (int u = 0; u < 2; ++u) {
                if (xs[u] < 0 || xs[u] >= nx) continue;
                for (int v = 0; v < 2; ++v) {
                    if (ys[v] < 0 || ys[v] >= ny) continue;
                    add_cross(xs[u], j, xc[u], i, ys[v], yc[v], a12);
                    add_cross(i, ys[v], yc[v], xs[u], j, xc[u], a12);
                }
            }
        }
    }

    const double inv_vol = 1.0 / vol;
    DenseMatrix s(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) s(p, q) = e(p, q) * inv_vol;
    return s;
}

}  // namespace

DenseMatrix assemble_stiffness(const Metric& m) {
    m.validate();
    if (m.geom.dim() == 1) {
        if (m.comps != 1) throw std::invalid_argument("stiffness: 1D metric must be scalar");
        if (m.geom.n_nodes[0] > 2000)
            throw std::invalid_argument("stiffness: 1D grid cap of 2000 unknowns exceeded");
        return stiffness_1d(m);
    }
    if (m.comps != 3) throw std::invalid_argument("stiffness: 2D metric must be symmetric 2x2");
    if (m.geom.node_count() > 3600)
        throw std::invalid_argument("stiffness: 2D grid cap of 3600 unknowns exceeded");
    return stiffness_2d(m);
}

EigResult symmetric_eig(const DenseMatrix& s) { return jacobi_eigensymmetric(s); }

EigenBasis discrete_basis(const Metric& m, int count, bool mean_zero) {
    const Geometry& g = m.geom;
    const int n = g.node_count();
    if (count < 1 || count > n)
        throw std::invalid_argument("discrete_basis: count outside [1, matrix dimension]");

    EigResult eig = symmetric_eig(assemble_stiffness(m));

    int first = 0;
    if (g.kind == GeomKind::circle && mean_zero) {
        // periodic operator has a one-dimensional kernel of constants
        if (std::abs(eig.values[0]) > 1e-8 * std::max(1.0, eig.values[1]))
            throw std::runtime_error("discrete_basis: periodic null mode not found");
        first = 1;
    }
    if (first + count > n) throw std::invalid_argument("discrete_basis: count too large");
    if (eig.values[first] <= 0.0)
        throw std::runtime_error("discrete_basis: operator not positive definite");

    EigenBasis b;
    b.geom = g;
    b.mode = BasisMode::discrete;
    b.mean_zero = g.kind == GeomKind::circle && mean_zero;
    b.values.assign(eig.values.begin() + first, eig.values.begin() + first + count);
    b.vectors = DenseMatrix(n, count);
    const double inv_sqrt_vol = 1.0 / std::sqrt(g.cell_volume());
    for (int k = 0; k < count; ++k) {
        for (int i = 0; i < n; ++i) b.vectors(i, k) = eig.vectors(i, first + k) * inv_sqrt_vol;
        if (b.mean_zero) {
            double mean = 0.0;
            for (int i = 0; i < n; ++i) mean += b.vectors(i, k);
            mean /= n;
            double nrm2 = 0.0;
            for (int i = 0; i < n; ++i) {
                b.vectors(i, k) -= mean;
                nrm2 += b.vectors(i, k) * b.vectors(i, k);
            }
            const double scale = 1.0 / std::sqrt(nrm2 * g.cell_volume());
            for (int i = 0; i < n; ++i) b.vectors(i, k) *= scale;
        }
    }

    // degenerate eigenvalues: reorder ties by the ascending index of the
    // dominant coefficient in the identity-metric basis
    int i = 0;
    while (i < count) {
        int j = i + 1;
        while (j < count && std::abs(b.values[j] - b.values[i]) <=
                                1e-8 * (std::abs(b.values[i]) + 1.0))
            ++j;
        if (j - i > 1) {
            const EigenBasis ref = analytic_basis(g, std::min(count + 4, g.n_nodes[0] / 4),
                                                  b.mean_zero || g.kind != GeomKind::circle);
            std::vector<int> dom(j - i);
            for (int c = i; c < j; ++c) {
                double best = -1.0;
                int arg = 0;
                for (int r = 0; r < ref.size(); ++r) {
                    double ip = 0.0;
                    for (int p = 0; p < n; ++p) ip += b.vectors(p, c) * ref.vectors(p, r);
                    if (std::abs(ip) > best) { best = std::abs(ip); arg = r; }
                }
                dom[c - i] = arg;
            }
            std::vector<int> order(j - i);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int c) { return dom[a] < dom[c]; });
            DenseMatrix tmp(n, j - i);
            std::vector<double> vals(j - i);
            for (int c = 0; c < j - i; ++c) {
                vals[c] = b.values[i + order[c]];
                for (int p = 0; p < n; ++p) tmp(p, c) = b.vectors(p, i + order[c]);
            }
            for (int c = 0; c < j - i; ++c) {
                b.values[i + c] = vals[c];
                for (int p = 0; p < n; ++p) b.vectors(p, i + c) = tmp(p, c);
            }
        }
        i = j;
    }
    return b;
}

}  // namespace fraclab
