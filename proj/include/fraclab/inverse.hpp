#pragma once

#include "fraclab/extension.hpp"
#include "fraclab/fracop.hpp"

namespace fraclab {

/// Dirichlet solve of the local operator: stiffness from assemble_stiffness,
/// banded Cholesky, nodal right-hand side.
ScalarField poisson_solve(const Metric& m, const ScalarField& f);

/// Finite-rank f (on O) -> v^f|_A with H^{-1} source weights (taken in a
/// fixed reference basis) and nodal L^2(A) target coordinates.
struct RungeProblem {
    Region O, A;
    SourceDict dict;
    DenseMatrix t_matrix;            // nA x J, columns scaled by sqrt(cell volume)
    std::vector<double> src_weight;  // ||f_j||^2_{H^{-1}}
    SingularSystem sv;               // of T W^{-1/2}
};

RungeProblem build_runge_T(const Metric& metric, const Region& o_region, const Region& a_region,
                           int count, std::shared_ptr<const EigenBasis> weight_basis);

struct RungeApprox {
    ScalarField f;            // recovered source, supported in O
    double error = 0.0;       // ||Tf - w||_{L^2(A)}
    double source_norm = 0.0; // ||f||_{H^{-1}}
    double target_norm = 0.0; // ||w||_{L^2(A)}
    int kept = 0;
};

/// Truncated-SVD construction f = sum_{sigma_j >= alpha} (beta_j / sigma_j) phi_j.
/// The bound ||f|| <= ||w|| / alpha is exact at the discrete level.
RungeApprox runge_approximate(const RungeProblem& rp, const RegionField& w, double alpha);

struct RungeTradeoffRow {
    double eps = 0.0;
    double achieved = 0.0;    // relative error
    double source_norm = 0.0;
    double alpha = 0.0;
    bool reachable = true;
};

struct RungeTradeoff {
    std::vector<RungeTradeoffRow> rows;
    double mu_fit = 0.0;      // ||f|| ~ eps^{-mu}
    double mu_correlation = 0.0;
};

/// a-harmonic targets on A_plus restricted to A, one table per target merged
/// by worst-case over targets per eps.
RungeTradeoff runge_tradeoff_table(const RungeProblem& rp,
                                   const std::vector<RegionField>& targets,
                                   const std::vector<double>& eps_schedule);

/// a-harmonic functions on the sub-domain spanned by A_plus from affine
/// boundary data (1D: w' ~ 1/a), restricted to region A.
std::vector<RegionField> harmonic_targets(const Metric& m, const Region& a_plus,
                                          const Region& a_region);

/// Dirichlet-to-Neumann matrix on the boundary faces of A_plus, entries from
/// the weak (volume) pairing, symmetrized with the defect reported. 1D: 2x2
/// with Euclidean norms; 2D: Fourier weights (1+m^2)^{+-1/4} on the face cycle.
struct DtNMatrix {
    Region a_plus;
    DenseMatrix lambda;            // face basis, symmetrized
    double asym_defect = 0.0;
    DenseMatrix fourier;           // face -> cycle Fourier basis (orthonormal)
    std::vector<double> freq;      // integer frequency per Fourier column
};

DtNMatrix build_dtn(const Metric& m, const Region& a_plus);

/// || Lambda_1 - Lambda_2 ||_{H^{1/2} -> H^{-1/2}} surrogate
double dtn_norm_diff(const DtNMatrix& a, const DtNMatrix& b);

enum class AlessandriniMode { sts, dtn };

struct AlessandriniResult {
    double lhs = 0.0, rhs = 0.0, residual = 0.0;
};

/// Both sides of the Alessandrini identity. sts: ((L1-L2) f1, f2) against the
/// gradient pairing with (a2 - a1); dtn: ((Lam1-Lam2) g1, g2) against (a1 - a2).
/// The right-hand side uses independent cell-centered gradients, so the
/// residual is a genuine O(h^2) discretization gap.
AlessandriniResult alessandrini_residual(const Metric& a1, const Metric& a2,
                                         AlessandriniMode mode, const Region& a_region,
                                         const ScalarField& in1, const ScalarField& in2,
                                         const Region* a_plus = nullptr,
                                         const std::vector<double>* g1 = nullptr,
                                         const std::vector<double>* g2 = nullptr);

struct FamilySpec {
    Geometry geom;
    Region A, A_plus, O;
    int K = 96;
    int J = 12;
    std::vector<double> taus;  // decreasing
};

struct StsDtnRow {
    double tau = 0.0, d_l1 = 0.0, d_lam = 0.0;
};

struct StsDtnResult {
    std::vector<StsDtnRow> rows;
    double gamma_fit = 0.0, gamma_correlation = 0.0;
    double c_fit = 0.0;  // single constant with ||dL1|| <= C ||dLam|| across all tau
    bool l1_monotone = true, lam_monotone = true;
};

StsDtnResult sts_vs_dtn_experiment(const FamilySpec& spec);

struct TransferRow {
    double tau = 0.0, eps_s = 0.0, delta1 = 0.0;
    bool excluded = false;  // eps_s >= 1/2: outside the small-data regime
};

struct TransferResult {
    std::vector<TransferRow> rows;
    std::vector<double> beta_grid;
    std::vector<double> beta_sup;  // sup_tau delta1 * |log eps_s|^beta
    bool covanishing = true;       // both columns strictly decreasing
    double alg_fit_p = 0.0;        // delta1 ~ eps_s^p exploratory fit
};

TransferResult stability_transfer_experiment(double s, const FamilySpec& spec,
                                             std::vector<double> beta_grid = {0.5, 1.0, 2.0,
                                                                              4.0});

}  // namespace fraclab
