#include "fraclab/fracop.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_basis(const SpectralCoeffs& c) {
    if (!c.basis) throw std::invalid_argument("spectral coeffs: missing basis");
    if (c.c.size() != c.basis->values.size())
        throw std::invalid_argument("spectral coeffs: length does not match basis");
}

}  // namespace

SpectralCoeffs analyze(const ScalarField& u, std::shared_ptr<const EigenBasis> basis) {
    if (!basis || !u.geom.same_grid(basis->geom))
        throw std::invalid_argument("analyze: basis/geometry mismatch");
    SpectralCoeffs out;
    out.basis = basis;
    const int n = u.geom.node_count();
    const double vol = u.geom.cell_volume();
    out.c.resize(basis->size());
    for (int k = 0; k < basis->size(); ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += u.v[i] * basis->vectors(i, k);
        out.c[k] = s * vol;
    }
    return out;
}

ScalarField synthesize(const SpectralCoeffs& coeffs) {
    check_basis(coeffs);
    const EigenBasis& b = *coeffs.basis;
    ScalarField f(b.geom);
    const int n = b.geom.node_count();
    for (int k = 0; k < b.size(); ++k) {
        const double ck = coeffs.c[k];
        if (ck == 0.0) continue;
        for (int i = 0; i < n; ++i) f.v[i] += ck * b.vectors(i, k);
    }
    return f;
}

SpectralCoeffs apply_frac(double s, const SpectralCoeffs& coeffs) {
    check_basis(coeffs);
    SpectralCoeffs out = coeffs;
    for (int k = 0; k < coeffs.basis->size(); ++k)
        out.c[k] = coeffs.c[k] * std::pow(coeffs.basis->values[k], s);
    return out;
}

SpectralCoeffs solve_sts(double s, const SpectralCoeffs& f) { return apply_frac(-s, f); }

ScalarField solve_sts_field(double s, const ScalarField& f,
                            std::shared_ptr<const EigenBasis> basis) {
    if (basis->torus()) {
        const double m = mean_value(f);
        if (std::abs(m) > 1e-10 * (norm_l2(f) + 1e-30))
            throw std::invalid_argument(
                "solve_sts: source on the circle must have zero mean (H^{-s} diamond class)");
    }
    return synthesize(solve_sts(s, analyze(f, basis)));
}

double sobolev_norm(double r, const SpectralCoeffs& coeffs) {
    check_basis(coeffs);
    double sum = 0.0;
    for (int k = 0; k < coeffs.basis->size(); ++k)
        sum += coeffs.basis->sobolev_weight(k, r) * coeffs.c[k] * coeffs.c[k];
    return std::sqrt(sum);
}

namespace {

// Dirichlet sines of the sub-box spanned by the region's cell faces, sampled
// at the region's cell centers: exactly orthonormal under the grid inner
// product (discrete sine transform identity).
struct SubboxMode {
    double eigenvalue;
    std::vector<double> values;  // per region node, row-major
};

std::vector<SubboxMode> subbox_modes(const Region& r, int count, bool even_only) {
    const Geometry& g = r.geom;
    const int dim = g.dim();
    const int nrx = r.extent_nodes(0);
    const int nry = dim == 2 ? r.extent_nodes(1) : 1;
    const double lx = r.face_hi(0) - r.face_lo(0);
    const double ly = dim == 2 ? r.face_hi(1) - r.face_lo(1) : 0.0;

    auto axis_mode = [](int j, int nr, double l, int i) {
        return std::sqrt(2.0 / l) * std::sin(j * kPi * (i + 0.5) / nr);
    };

    std::vector<std::pair<double, std::array<int, 2>>> order;
    const int maxx = nrx - 1, maxy = nry - 1;
    if (dim == 1) {
        for (int j = 1; j <= maxx; ++j) {
            if (even_only && j % 2 != 0) continue;
            order.push_back({std::pow(j * kPi / lx, 2), {j, 0}});
        }
    } else {
        for (int j = 1; j <= maxx; ++j)
            for (int k = 1; k <= maxy; ++k)
                order.push_back({std::pow(j * kPi / lx, 2) + std::pow(k * kPi / ly, 2), {j, k}});
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
    });
    if (count > static_cast<int>(order.size()))
        throw std::invalid_argument("source dict: count exceeds resolvable sub-box modes");

    std::vector<SubboxMode> modes(count);
    for (int m = 0; m < count; ++m) {
        modes[m].eigenvalue = order[m].first;
        modes[m].values.resize(nrx * nry);
        const int jx = order[m].second[0], jy = order[m].second[1];
        for (int q = 0; q < nry; ++q)
            for (int p = 0; p < nrx; ++p) {
                double v = axis_mode(jx, nrx, lx, p);
                if (dim == 2) v *= axis_mode(jy, nry, ly, q);
                modes[m].values[q * nrx + p] = v;
            }
    }
    return modes;
}

}  // namespace

SourceDict make_source_dict(std::shared_ptr<const EigenBasis> basis, const Region& region,
                            int count) {
    if (!basis || !basis->geom.same_grid(region.geom))
        throw std::invalid_argument("source dict: basis/region geometry mismatch");
    SourceDict d;
    d.basis = basis;
    d.region = region;
    d.count = count;
    const bool even_only = basis->torus();
    const auto modes = subbox_modes(region, count, even_only);
    for (const auto& m : modes) {
        RegionField rf;
        rf.region = region;
        rf.v = m.values;
        d.elements.push_back(extend_by_zero(rf));
        d.subbox_eigenvalue.push_back(m.eigenvalue);
        d.coeffs.push_back(analyze(d.elements.back(), basis));
    }
    return d;
}

SourceDict make_trace_dict(const Geometry& g, const Region& region, int count) {
    SourceDict d;
    d.region = region;
    d.count = count;
    const bool even_only = g.kind == GeomKind::circle;
    const auto modes = subbox_modes(region, count, even_only);
    for (const auto& m : modes) {
        RegionField rf;
        rf.region = region;
        rf.v = m.values;
        d.elements.push_back(extend_by_zero(rf));
        d.subbox_eigenvalue.push_back(m.eigenvalue);
    }
    return d;
}

namespace {

OperatorMatrix build_sts_matrix_impl(double s, const SourceDict& dict, const Region& target,
                                     double r_src, double r_tgt,
                                     std::shared_ptr<const EigenBasis> weight_basis,
                                     bool parallel) {
    if (dict.coeffs.empty())
        throw std::invalid_argument("build_sts_matrix: dict has no ambient analysis");
    const auto& basis = *dict.basis;
    const SourceDict trace = make_trace_dict(basis.geom, target, dict.count);
    const bool torus = basis.torus();

    OperatorMatrix om;
    om.r_src = r_src;
    om.r_tgt = r_tgt;
    om.region_mismatch = !(dict.region.lo == target.lo && dict.region.hi == target.hi);
    om.m = DenseMatrix(trace.count, dict.count);
    om.src_weight.resize(dict.count);
    om.tgt_weight.resize(trace.count);
    for (int i = 0; i < trace.count; ++i) {
        const double nu = trace.subbox_eigenvalue[i];
        om.tgt_weight[i] = torus ? std::pow(1.0 + nu, r_tgt) : std::pow(nu, r_tgt);
    }

    const auto tgt_idx = target.node_indices();
    const double vol = basis.geom.cell_volume();

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int j = 0; j < dict.count; ++j) {
        const ScalarField u = synthesize(solve_sts(s, dict.coeffs[j]));
        for (int i = 0; i < trace.count; ++i) {
            double ip = 0.0;
            for (std::size_t q = 0; q < tgt_idx.size(); ++q)
                ip += u.v[tgt_idx[q]] * trace.elements[i].v[tgt_idx[q]];
            om.m(i, j) = ip * vol;
        }
        const double w = weight_basis
                             ? sobolev_norm(r_src, analyze(dict.elements[j], weight_basis))
                             : sobolev_norm(r_src, dict.coeffs[j]);
        om.src_weight[j] = w * w;
    }
    return om;
}

}  // namespace

OperatorMatrix build_sts_matrix(double s, const SourceDict& dict, const Region& target,
                                double r_src, double r_tgt,
                                std::shared_ptr<const EigenBasis> weight_basis) {
    return build_sts_matrix_impl(s, dict, target, r_src, r_tgt, weight_basis, true);
}

OperatorMatrix build_sts_matrix_serial(double s, const SourceDict& dict, const Region& target,
                                       double r_src, double r_tgt,
                                       std::shared_ptr<const EigenBasis> weight_basis) {
    return build_sts_matrix_impl(s, dict, target, r_src, r_tgt, weight_basis, false);
}

namespace {

DenseMatrix weighted(const OperatorMatrix& om) {
    DenseMatrix b = om.m;
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const double wi = std::sqrt(om.tgt_weight[i]);
        for (std::size_t j = 0; j < b.cols(); ++j)
            b(i, j) = wi * om.m(i, j) / std::sqrt(om.src_weight[j]);
    }
    return b;
}

}  // namespace

SingularSystem svd(const OperatorMatrix& om) {
    for (double w : om.src_weight)
        if (!(w > 0.0)) throw std::invalid_argument("svd: source weights must be positive");
    for (double w : om.tgt_weight)
        if (!(w > 0.0)) throw std::invalid_argument("svd: target weights must be positive");
    const SvdResult r = svd_one_sided(weighted(om));
    return {r.sigma, r.u, r.v};
}

double operator_norm_diff(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.m.rows() != b.m.rows() || a.m.cols() != b.m.cols())
        throw std::invalid_argument("operator_norm_diff: dimension mismatch");
    if (a.r_src != b.r_src || a.r_tgt != b.r_tgt)
        throw std::invalid_argument("operator_norm_diff: weight order mismatch");
    for (std::size_t j = 0; j < a.src_weight.size(); ++j)
        if (std::abs(a.src_weight[j] - b.src_weight[j]) > 1e-9 * a.src_weight[j])
            throw std::invalid_argument("operator_norm_diff: source weights differ between operands");
    OperatorMatrix d = a;
    d.m = a.m - b.m;
    const SvdResult r = svd_one_sided(weighted(d));
    return r.sigma.empty() ? 0.0 : r.sigma[0];
}

}  // namespace fraclab
