#pragma once

#include <memory>

#include "fraclab/geometry.hpp"
#include "fraclab/linalg.hpp"

namespace fraclab {

enum class BasisMode { analytic, discrete };

/// Ordered eigenpairs of -div(a grad) with L2-orthonormal discrete
/// eigenvectors. `vectors` holds one eigenvector per column.
struct EigenBasis {
    Geometry geom;
    BasisMode mode = BasisMode::analytic;
    bool mean_zero = false;  // circle only: constant mode excluded
    std::vector<double> values;
    DenseMatrix vectors;  // node_count x K

    int size() const { return static_cast<int>(values.size()); }
    bool torus() const { return geom.kind == GeomKind::circle; }
    /// spectral Sobolev weight: lambda^r (Dirichlet) or (1+lambda)^r (torus)
    double sobolev_weight(int k, double r) const;
    ScalarField field(int k) const;
};

/// Closed-form eigenpairs of the identity-metric operator, sampled on the
/// grid. Interval: sin(k pi x / L); rectangle: tensor products sorted by
/// eigenvalue; circle: cos/sin pairs, constant mode dropped when mean_zero.
/// Nyquist guard: K <= n_nodes/4 per axis.
EigenBasis analytic_basis(const Geometry& g, int count, bool mean_zero = true);

/// Conservative FD stencil with edge-midpoint coefficient averaging,
/// a_{i+1/2} = (a_i + a_{i+1})/2. Rows approximate (-div a grad u)(x_i); the
/// identity metric on an interval gives the classical (-1, 2, -1)/h^2 rows.
DenseMatrix assemble_stiffness(const Metric& m);

/// Jacobi eigendecomposition (ascending values, orthonormal vectors).
EigResult symmetric_eig(const DenseMatrix& s);

/// First K eigenpairs of the discrete operator; vectors L2-normalized with
/// the discrete inner product. On the circle with mean_zero the null mode is
/// dropped. Eigenvalue ties are ordered by the ascending index of the
/// dominant coefficient in the identity-metric basis.
EigenBasis discrete_basis(const Metric& m, int count, bool mean_zero = true);

}  // namespace fraclab
