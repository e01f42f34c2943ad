#pragma once

#include <memory>

#include "fraclab/eigenbasis.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/linalg.hpp"

namespace fraclab {

struct SpectralCoeffs {
    std::shared_ptr<const EigenBasis> basis;
    std::vector<double> c;
};

SpectralCoeffs analyze(const ScalarField& u, std::shared_ptr<const EigenBasis> basis);
ScalarField synthesize(const SpectralCoeffs& coeffs);

/// sum lambda_k^s c_k phi_k; s = -1 is the inverse, s = 1 the local operator
SpectralCoeffs apply_frac(double s, const SpectralCoeffs& coeffs);

/// u^f with L^s u^f = f. On the circle f must have zero mean (the constant
/// mode is absent from a mean_zero basis; a nonzero mean has nowhere to go).
SpectralCoeffs solve_sts(double s, const SpectralCoeffs& f);
ScalarField solve_sts_field(double s, const ScalarField& f,
                            std::shared_ptr<const EigenBasis> basis);

/// (sum w_k^r c_k^2)^{1/2} with w_k = lambda_k (Dirichlet) or 1+lambda_k (torus)
double sobolev_norm(double r, const SpectralCoeffs& coeffs);

/// Finite surrogate of C_c^infty(O): Dirichlet eigenfunctions of the sub-box
/// spanned by the region's cell faces, zero-extended. Exactly L2-orthonormal
/// on the grid. On the circle only even sine indices are used so that every
/// element has exactly zero discrete mean.
struct SourceDict {
    std::shared_ptr<const EigenBasis> basis;  // ambient basis (for coeffs); may be null for pure trace use
    Region region;
    int count = 0;
    std::vector<ScalarField> elements;        // zero-extended
    std::vector<SpectralCoeffs> coeffs;       // ambient analysis (empty when basis is null)
    std::vector<double> subbox_eigenvalue;    // Dirichlet eigenvalue of the sub-box mode
};

SourceDict make_source_dict(std::shared_ptr<const EigenBasis> basis, const Region& region,
                            int count);
/// same construction, no ambient analysis; used as a trace test basis
SourceDict make_trace_dict(const Geometry& g, const Region& region, int count);

/// Finite-rank representation of f -> u^f|_target in the trace basis, with
/// diagonal Sobolev weights: src weight = ambient dual norm of the element,
/// tgt weight = sub-box eigenvalue to the r_tgt power. The target side is a
/// surrogate for the quotient H^{r}(O) norm (the sub-box spectral norm
/// dominates the quotient norm), and the sub-box eigen-dictionary spans a
/// slightly smaller source ball than C_c^infty(O); systematic, not tuned.
struct OperatorMatrix {
    DenseMatrix m;  // P x J
    double r_src = 0.0, r_tgt = 0.0;
    std::vector<double> src_weight;  // ||f_j||^2_{H^{r_src}}
    std::vector<double> tgt_weight;  // nu_i^{r_tgt} (or (1+nu_i)^{r_tgt} on the torus)
    bool region_mismatch = false;    // dict region != target region (allowed, flagged)
};

/// weight_basis, when given, fixes the source Sobolev weights to a reference
/// basis so matrices built over different metrics share one norm (the norms
/// are uniformly equivalent; comparisons need a single representative).
OperatorMatrix build_sts_matrix(double s, const SourceDict& dict, const Region& target,
                                double r_src, double r_tgt,
                                std::shared_ptr<const EigenBasis> weight_basis = nullptr);
OperatorMatrix build_sts_matrix_serial(double s, const SourceDict& dict, const Region& target,
                                       double r_src, double r_tgt,
                                       std::shared_ptr<const EigenBasis> weight_basis = nullptr);

struct SingularSystem {
    std::vector<double> sigma;  // nonincreasing
    DenseMatrix u, v;           // weighted-coordinate singular vectors
};

/// Singular system of W_tgt^{1/2} M W_src^{-1/2}.
SingularSystem svd(const OperatorMatrix& om);

/// sigma_1 of the weighted difference: the discrete surrogate of the operator
/// norm in every stability statement.
double operator_norm_diff(const OperatorMatrix& a, const OperatorMatrix& b);

}  // namespace fraclab
