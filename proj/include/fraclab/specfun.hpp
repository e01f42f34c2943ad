#pragma once

#include <array>
#include <functional>
#include <vector>

namespace fraclab::specfun {

/// Gamma function via the fixed-coefficient Lanczos approximation (g = 7,
/// 9 coefficients) with the reflection formula for x < 1/2. Relative error
/// below 1e-13 on [0.1, 30]. Poles at non-positive integers throw.
double gamma_fn(double x);

/// Independent route for x in (0, 2]: reciprocal of the Taylor series of
/// 1/Gamma built from the zeta recurrence. Cross-checks the Lanczos table.
double gamma_series_recip(double x);

/// Modified Bessel function of the second kind, order nu in (0,1), z > 0.
/// Power series (accumulated in extended precision) up to z_switch, large-z
/// asymptotic expansion with optimal truncation beyond. Relative error below
/// 1e-9 on z in [1e-3, 50].
double bessel_k(double nu, double z);

/// Bessel function of the first kind, non-integer order nu in (-1, 1).
double bessel_j(double nu, double z);

/// series/asymptotic crossover for bessel_k; both branches agree to ~1e-9 on [8,12]
inline constexpr double kBesselKSwitch = 10.0;

/// First m_max positive zeros of J_{-s}, strictly increasing, refined by
/// bisection until |J_{-s}(j)| <= 1e-10.
std::vector<double> bessel_j_neg_zeros(double s, int m_max);

/// McMahon first-order estimate of the m-th zero of J_{nu}: (m + nu/2 - 1/4) pi.
double mcmahon_zero(double nu, int m);

/// int_L^infty z^{1-s} K_s(z) dz. At L = 0 equals 2^{-s} Gamma(1-s).
double kernel_tail(double s, double L);

/// int_0^{hi} z^{1-s} K_s(z) dz by termwise integration of the defining
/// series; exact treatment of the z^{1-2s} weight singularity (hi <= 2).
double kernel_head(double s, double hi);

/// int_L^infty z K_nu(z)^2 dz for L >= 1 (asymptotic tail regime).
double kernel_tail_sq(double nu, double L);

struct FracConstants {
    double s;
    double c_s;          // 2^{2s-1} Gamma(s) / Gamma(1-s)
    double cbar_s;       // 4^s Gamma(s) / (2s |Gamma(-s)|)
    double ctilde_s;     // 2^{1-s} / Gamma(s)
    double kernel_mass;  // 2^{-s} Gamma(1-s)

    static FracConstants make(double s);
};

/// Recursive Simpson quadrature, absolute tolerance, max depth 40.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 40);

/// 12-point Gauss-Legendre nodes/weights on [-1, 1].
const std::array<double, 12>& gl12_nodes();
const std::array<double, 12>& gl12_weights();

}  // namespace fraclab::specfun
