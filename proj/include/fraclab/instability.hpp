#pragma once

#include <cstdint>

#include "fraclab/fracop.hpp"

namespace fraclab {

/// Weighted-cylinder eigenvalues lambda_{l,m} = mu_l + j_{-s,m}^2 / R^2,
/// merged ascending (ties by (lambda, l, m)).
struct CylinderSpectrum {
    double r_height = 0.0;
    double s = 0.5;
    struct Entry {
        int l = 0, m = 0;
        double lambda = 0.0;
    };
    std::vector<Entry> entries;
};

CylinderSpectrum cylinder_spectrum(const std::vector<double>& mu, double r_height, double s,
                                   int count);
/// convenience overload building mu from the metric (analytic when identity)
CylinderSpectrum cylinder_spectrum(const Metric& base_metric, double r_height, double s,
                                   int count);

struct WeylRow {
    double lambda = 0.0;
    int count = 0;
    double ratio = 0.0;  // N(Lambda) / (R * Lambda^{(n+1)/2})
};

struct WeylResult {
    std::vector<WeylRow> rows;
    double band_min = 0.0, band_max = 0.0;  // ratio band over the top half
    double slope = 0.0;                     // log lambda_k vs log k over the top half
};

WeylResult weyl_count_check(const CylinderSpectrum& spec, const std::vector<double>& lambda_grid,
                            int ambient_dim);

struct CompressionSpec {
    Geometry geom;  // interval; the section-5 operator uses the identity metric
    Region O, O_plus;
    double s = 0.5;
    double r_height = 8.0;
    int dict_count = 66;
    int modes = 528;   // ambient modes, >= 8 * dict_count
    int nt = 72;       // graded t-levels; needs nt >= 8 * r_height
    int x_stride = 3;  // every x_stride-th cell of the global lattice outside O_plus
};

/// Singular values of the discretized map f (source dict on O) -> u~_0 on
/// (Omega \ O_plus) x (0, R) with the t^{(1-2s)/2} sample weights and H^{-s}
/// source weights. x samples are taken from a fixed global lattice so nested
/// O_plus regions give row subsets (sigma then decreases entrywise).
std::vector<double> compression_singulars(const CompressionSpec& spec);
std::vector<double> compression_singulars_serial(const CompressionSpec& spec);

/// Operator-norm surrogate of the above-height-R restriction:
/// ctilde_s sqrt(int_{sqrt(lambda1) R} z (K_s^2 + K_{1-s}^2) dz).
/// Requires sqrt(lambda1) R >= 5 (asymptotic Bessel regime).
double tail_operator_bound(double s, double lambda1, double r_height);

/// frozen envelope: tail_operator_bound <= kTailEnvelopeC * exp(-sqrt(lambda1) R)
inline constexpr double kTailEnvelopeC = 2.0;

struct EntropyBounds {
    std::vector<double> lower, upper;  // index = N - 1
};

/// sup_k e^{-N/2k} (sigma_1...sigma_k)^{1/k} and the same with the surrogate
/// constants C = 1, c_1 = 1/2 on the upper route ("bounds up to absolute
/// constants").
EntropyBounds entropy_from_singulars(const std::vector<double>& sigma, int n_max);

struct DecayFit {
    double log_c = 0.0;
    double c = 0.0;
    double correlation = 0.0;
};

/// least squares of log sigma_k = log C - c k^p over k >= k_min
DecayFit decay_fit(const std::vector<double>& sigma, double p, int k_min = 1);

}  // namespace fraclab
