#include "fraclab/instability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fraclab/extension.hpp"
#include "fraclab/specfun.hpp"

namespace fraclab {

CylinderSpectrum cylinder_spectrum(const std::vector<double>& mu, double r_height, double s,
                                   int count) {
    if (mu.empty() || count < 1) throw std::invalid_argument("cylinder_spectrum: empty input");
    if (!(r_height > 0.0)) throw std::invalid_argument("cylinder_spectrum: R > 0 required");

    int m_count = 16;
    std::vector<double> zeros = specfun::bessel_j_neg_zeros(s, m_count);
    const double r2 = r_height * r_height;

    for (;;) {
        std::vector<CylinderSpectrum::Entry> entries;
        for (int l = 0; l < static_cast<int>(mu.size()); ++l)
            for (int m = 0; m < m_count; ++m)
                entries.push_back({l + 1, m + 1, mu[l] + zeros[m] * zeros[m] / r2});
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            if (a.lambda != b.lambda) return a.lambda < b.lambda;
            if (a.l != b.l) return a.l < b.l;
            return a.m < b.m;
        });
        if (static_cast<int>(entries.size()) < count)
            throw std::invalid_argument("cylinder_spectrum: count exceeds available (l,m) products");
        const double lam_star = entries[count - 1].lambda;
        const bool m_exhausted = mu.front() + zeros.back() * zeros.back() / r2 > lam_star;
        const bool l_exhausted = mu.back() + zeros.front() * zeros.front() / r2 > lam_star;
        if (m_exhausted && l_exhausted) {
            entries.resize(count);
            CylinderSpectrum out;
            out.r_height = r_height;
            out.s = s;
            out.entries = std::move(entries);
            return out;
        }
        if (!l_exhausted && mu.back() + zeros.front() * zeros.front() / r2 <= lam_star)
            throw std::invalid_argument(
                "cylinder_spectrum: insufficient base eigenvalues for requested count");
        m_count *= 2;
        zeros = specfun::bessel_j_neg_zeros(s, m_count);
    }
}

CylinderSpectrum cylinder_spectrum(const Metric& base_metric, double r_height, double s,
                                   int count) {
    bool is_identity = true;
    for (std::size_t i = 0; i < base_metric.a.size() && is_identity; ++i) {
        const double want = base_metric.comps == 1
                                ? 1.0
                                : (i % 3 == 1 ? 0.0 : 1.0);
        if (base_metric.a[i] != want) is_identity = false;
    }
    std::vector<double> mu;
    const int base_count = std::min(base_metric.geom.n_nodes[0] / 4, count + 8);
    if (is_identity) {
        mu = analytic_basis(base_metric.geom, base_count).values;
    } else {
        mu = discrete_basis(base_metric, base_count).values;
    }
    return cylinder_spectrum(mu, r_height, s, count);
}

WeylResult weyl_count_check(const CylinderSpectrum& spec, const std::vector<double>& lambda_grid,
                            int ambient_dim) {
    WeylResult out;
    const double expo = 0.5 * (ambient_dim + 1);
    const double lam_max = spec.entries.back().lambda;
    for (double lam : lambda_grid) {
        if (lam > lam_max)
            throw std::invalid_argument("weyl_count_check: Lambda outside the computed range");
        const int n = static_cast<int>(std::count_if(
            spec.entries.begin(), spec.entries.end(),
            [&](const auto& e) { return e.lambda <= lam; }));
        out.rows.push_back({lam, n, n / (spec.r_height * std::pow(lam, expo))});
    }
    // band over the top half of the grid
    const std::size_t half = out.rows.size() / 2;
    out.band_min = out.band_max = out.rows[half].ratio;
    for (std::size_t i = half; i < out.rows.size(); ++i) {
        out.band_min = std::min(out.band_min, out.rows[i].ratio);
        out.band_max = std::max(out.band_max, out.rows[i].ratio);
    }
    // log-log slope of lambda_k vs k over the top half of the spectrum
    std::vector<double> lx, ly;
    for (std::size_t k = spec.entries.size() / 2; k < spec.entries.size(); ++k) {
        lx.push_back(std::log(static_cast<double>(k + 1)));
        ly.push_back(std::log(spec.entries[k].lambda));
    }
    out.slope = fit_line(lx, ly).slope;
    return out;
}

namespace {

std::vector<double> compression_impl(const CompressionSpec& spec, bool parallel) {
    const Geometry& g = spec.geom;
    if (g.kind != GeomKind::interval)
        throw std::invalid_argument("compression: interval geometry required");
    if (spec.modes < 8 * spec.dict_count)
        throw std::invalid_argument("compression: ambient modes must be >= 8 * dict count");
    if (spec.nt < 8 * spec.r_height)
        throw std::invalid_argument("compression: t-grid too coarse, need >= 8 samples per unit height");
    if (!region_strictly_inside(spec.O, spec.O_plus))
        throw std::invalid_argument("compression: O must sit strictly inside O_plus");

    const auto basis = std::make_shared<EigenBasis>(analytic_basis(g, spec.modes));
    const SourceDict dict = make_source_dict(basis, spec.O, spec.dict_count);
    const int K = spec.modes, J = spec.dict_count;

    // graded heights (quadratic toward 0), midpoints and cell widths
    std::vector<double> tm(spec.nt), dt(spec.nt);
    for (int q = 0; q < spec.nt; ++q) {
        const double e0 = spec.r_height * std::pow(double(q) / spec.nt, 2.0);
        const double e1 = spec.r_height * std::pow(double(q + 1) / spec.nt, 2.0);
        tm[q] = 0.5 * (e0 + e1);
        dt[q] = e1 - e0;
    }

    // fixed global x lattice, filtered by O_plus: nested O_plus => row subset
    std::vector<int> xs;
    for (int i = 0; i < g.n_nodes[0]; i += spec.x_stride)
        if (!spec.O_plus.contains_flat(i)) xs.push_back(i);

    DenseMatrix hprof(K, spec.nt);
    for (int q = 0; q < spec.nt; ++q) {
        const auto h = extension_mode_profile(spec.s, basis->values, tm[q]);
        for (int k = 0; k < K; ++k) hprof(k, q) = h[k];
    }
    std::vector<double> roww(spec.nt);
    const double xw = g.h(0) * spec.x_stride;
    for (int q = 0; q < spec.nt; ++q)
        roww[q] = std::sqrt(xw * dt[q] * std::pow(tm[q], 1.0 - 2.0 * spec.s));

    const int nx = static_cast<int>(xs.size());
    DenseMatrix b(static_cast<std::size_t>(nx) * spec.nt, J);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int j = 0; j < J; ++j) {
        const auto& c = dict.coeffs[j].c;
        std::vector<double> wk(K);
        for (int q = 0; q < spec.nt; ++q) {
            for (int k = 0; k < K; ++k) wk[k] = c[k] * hprof(k, q);
            for (int ix = 0; ix < nx; ++ix) {
                double acc = 0.0;
                for (int k = 0; k < K; ++k) acc += wk[k] * basis->vectors(xs[ix], k);
                b(static_cast<std::size_t>(ix) * spec.nt + q, j) = acc * roww[q];
            }
        }
        double wsq = 0.0;
        for (int k = 0; k < K; ++k)
            wsq += std::pow(basis->values[k], -spec.s) * c[k] * c[k];
        const double inv = 1.0 / std::sqrt(wsq);
        for (std::size_t rr = 0; rr < b.rows(); ++rr) b(rr, j) *= inv;
    }

    return svd_one_sided(std::move(b)).sigma;
}

}  // namespace

std::vector<double> compression_singulars(const CompressionSpec& spec) {
    return compression_impl(spec, true);
}

std::vector<double> compression_singulars_serial(const CompressionSpec& spec) {
    return compression_impl(spec, false);
}

double tail_operator_bound(double s, double lambda1, double r_height) {
    const double l = std::sqrt(lambda1) * r_height;
    if (!(l >= 5.0))
        throw std::invalid_argument("tail_operator_bound: below the asymptotic regime sqrt(lambda1) R >= 5");
    const auto fc = specfun::FracConstants::make(s);
    return fc.ctilde_s *
           std::sqrt(specfun::kernel_tail_sq(s, l) + specfun::kernel_tail_sq(1.0 - s, l));
}

EntropyBounds entropy_from_singulars(const std::vector<double>& sigma, int n_max) {
    if (sigma.empty()) throw std::invalid_argument("entropy: empty sigma");
    for (std::size_t i = 1; i < sigma.size(); ++i)
        if (sigma[i] > sigma[i - 1])
            throw std::invalid_argument("entropy: sigma must be nonincreasing");
    std::vector<double> logmean;  // prefix geometric means of positive sigma
    double acc = 0.0;
    for (std::size_t k = 0; k < sigma.size() && sigma[k] > 0.0; ++k) {
        acc += std::log(sigma[k]);
        logmean.push_back(acc / static_cast<double>(k + 1));
    }
    if (logmean.empty()) throw std::invalid_argument("entropy: sigma must be positive");

    // surrogate constants C = 1, c1 = 1/2 (absolute constants of the
    // reference inequality are unnamed; shape is the testable content)
    const double c_up = 1.0, c1 = 0.5;
    EntropyBounds out;
    for (int n = 1; n <= n_max; ++n) {
        double lo = -1e308, up = -1e308;
        for (std::size_t k = 0; k < logmean.size(); ++k) {
            const double kk = static_cast<double>(k + 1);
            lo = std::max(lo, -n / (2.0 * kk) + logmean[k]);
            up = std::max(up, -c1 * n / kk + logmean[k]);
        }
        out.lower.push_back(std::exp(lo));
        out.upper.push_back(c_up * std::exp(up));
    }
    return out;
}

DecayFit decay_fit(const std::vector<double>& sigma, double p, int k_min) {
    std::vector<double> x, y;
    for (std::size_t k = static_cast<std::size_t>(std::max(1, k_min)); k <= sigma.size(); ++k) {
        if (!(sigma[k - 1] > 0.0)) break;
        x.push_back(std::pow(static_cast<double>(k), p));
        y.push_back(std::log(sigma[k - 1]));
    }
    if (x.size() < 8) throw std::invalid_argument("decay_fit: need at least 8 positive values");
    bool all_equal = true;
    for (double v : y)
        if (v != y.front()) { all_equal = false; break; }
    if (all_equal) throw std::invalid_argument("decay_fit: degenerate sigma (all equal)");
    const LineFit f = fit_line(x, y);
    return {f.intercept, -f.slope, f.correlation};
}

}  // namespace fraclab
