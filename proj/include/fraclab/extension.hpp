#pragma once

#include <cstdint>

#include "fraclab/fracop.hpp"

namespace fraclab {

/// Harmonic-extension slice u~(., t). Per mode the profile is
/// ctilde_s K_s(sqrt(lambda) t) (t/sqrt(lambda))^s, with the t -> 0 limit
/// lambda^{-s} (so the trace equals the fractional solve).
struct ExtensionSlice {
    double t = 0.0;
    ScalarField values;
};

/// per-mode profile factors at height t (t = 0 gives lambda^{-s})
std::vector<double> extension_mode_profile(double s, const std::vector<double>& lambda, double t);

ExtensionSlice extension_eval(double s, const SpectralCoeffs& f, double t);

/// slice evaluation at many heights; rows are heights (OpenMP across rows,
/// each row accumulated sequentially so results are thread-count invariant)
DenseMatrix eval_slices(double s, const SpectralCoeffs& f, const std::vector<double>& heights);
DenseMatrix eval_slices_serial(double s, const SpectralCoeffs& f,
                               const std::vector<double>& heights);

struct NeumannResult {
    double residual_extrapolated = 0.0;
    double fitted_order = 0.0;
    std::vector<double> probe_residuals;
};

/// Checks -cbar_s lim t^{1-2s} d_t u~ = f by centered differences taken in
/// the variable t^{2s} (in plain t the difference quotient of the singular
/// t^{2s} component has an O(1) bias for s != 1/2), extrapolating the known
/// leading t^{2-2s} error term from the two smallest probes.
NeumannResult neumann_trace_residual(double s, const SpectralCoeffs& f,
                                     const std::vector<double>& t_probes);

struct QuadratureSpec {
    int panels = 40;       // Gauss-Legendre panels on (0, t_max], edges ~ (j/P)^2
    double t_max = 0.0;    // 0 = choose from the tail bound
    double tail_tol = 1e-8;
};

struct ReductionResult {
    ScalarField analytic;  // (c_s ctilde_s kernel_mass) * L_a^{-1} f
    ScalarField numeric;   // c_s * quadrature of t^{1-2s} u~(., t)
    double rel_discrepancy = 0.0;
    double tail_bound = 0.0;  // certified bound on the omitted t > t_max part
    bool tail_ok = true;
    std::vector<double> mode_lambda, mode_analytic, mode_numeric, mode_tail;
};

/// c_s int_0^infty t^{1-2s} u~^f dt along two routes: the Gamma-identity
/// (analytic) and graded Gauss-Legendre quadrature plus tail bound (numeric).
ReductionResult reduction_integral(double s, const SpectralCoeffs& f, QuadratureSpec spec = {});

struct TailBoundResult {
    double measured = 0.0;  // spectral-H^1 norm of the t > L tail field
    double bound = 0.0;     // ctilde_s * kernel_tail(s, sqrt(lambda_1) L) * ||f||_{H^-1}
    bool dominated = true;  // measured <= bound (exact contract)
};

TailBoundResult truncation_tail_bound(double s, const SpectralCoeffs& f, double L);

struct ThreeBallsSpec {
    std::shared_ptr<const EigenBasis> basis;  // identity-metric basis
    Region O;
    double s = 0.5;
    double center_x = 0.0, center_t = 0.0;  // ball center in the (x, t) cylinder
    double r = 0.0;                         // B_r, B_2r, B_4r
    double delta0 = 0.0;                    // balls must stay above this height
    int samples = 100;
    std::uint64_t seed = 1;
    int nx_cells = 96, nt_cells = 96;       // lattice over the B_4r bounding box
    int alpha_grid = 19;
};

struct ThreeBallsResult {
    double c_fit = 0.0;
    double alpha = 0.0;
    int violations = 0;
    int samples = 0;
    std::vector<std::array<double, 3>> norms;  // (B_r, B_2r, B_4r) per sample
};

/// Random extension solutions (unit H^{-s} coefficient vectors) tested
/// against ||w||_{2r} <= C ||w||_r^alpha ||w||_{4r}^{1-alpha} in the weighted
/// L^2(t^{1-2s}) ball norms; returns the smallest-constant grid fit.
ThreeBallsResult three_balls_check(const ThreeBallsSpec& spec);

struct BoundaryBulkSpec {
    Geometry geom;
    Region A, O, O_plus;
    double s = 0.5;
    int K = 96;
    std::vector<double> taus;  // decreasing bump amplitudes
    double center_x = 0.0;     // half-ball center on O x {0}
    double cr = 0.0;           // half-ball radius
    int nx_cells = 64, nt_cells = 64;
    int source_modes = 4;      // dict elements on O combined into the probe source
};

struct BoundaryBulkRow {
    double tau = 0.0, eps = 0.0, bulk = 0.0;
};

struct BoundaryBulkResult {
    std::vector<BoundaryBulkRow> rows;
    double slope = 0.0;  // log bulk vs log eps
    bool eps_monotone = true, bulk_monotone = true;
};

/// Metrics a_tau = Id + tau b(A) agree on O_plus, so the extension difference
/// has vanishing weighted Neumann data on O; tabulates boundary-trace size
/// against the half-ball bulk norm (the boundary-bulk co-vanishing).
BoundaryBulkResult boundary_bulk_check(const BoundaryBulkSpec& spec);

}  // namespace fraclab
