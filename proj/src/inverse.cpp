#include "fraclab/inverse.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab {

namespace {

std::size_t stiffness_bandwidth(const Geometry& g) {
    return g.dim() == 1 ? 1 : static_cast<std::size_t>(g.n_nodes[0]) + 1;
}

}  // namespace

ScalarField poisson_solve(const Metric& m, const ScalarField& f) {
    if (!m.geom.same_grid(f.geom)) throw std::invalid_argument("poisson_solve: geometry mismatch");
    if (m.geom.boundary() != BoundaryKind::dirichlet)
        throw std::invalid_argument("poisson_solve: Dirichlet geometry required");
    const DenseMatrix s = assemble_stiffness(m);
    BandedCholesky chol(s, stiffness_bandwidth(m.geom));
    return {m.geom, chol.solve(f.v)};
}

RungeProblem build_runge_T(const Metric& metric, const Region& o_region, const Region& a_region,
                           int count, std::shared_ptr<const EigenBasis> weight_basis) {
    if (!regions_disjoint(o_region, a_region))
        throw std::invalid_argument("build_runge_T: O and A must be disjoint");
    RungeProblem rp;
    rp.O = o_region;
    rp.A = a_region;
    rp.dict = make_source_dict(weight_basis, o_region, count);

    const auto a_idx = a_region.node_indices();
    const double sq_vol = std::sqrt(metric.geom.cell_volume());
    rp.t_matrix = DenseMatrix(a_idx.size(), count);
    const DenseMatrix s = assemble_stiffness(metric);
    BandedCholesky chol(s, stiffness_bandwidth(metric.geom));
    for (int j = 0; j < count; ++j) {
        const std::vector<double> v = chol.solve(rp.dict.elements[j].v);
        for (std::size_t q = 0; q < a_idx.size(); ++q) rp.t_matrix(q, j) = v[a_idx[q]] * sq_vol;
    }
    rp.src_weight.resize(count);
    for (int j = 0; j < count; ++j) {
        const double w = sobolev_norm(-1.0, rp.dict.coeffs[j]);
        rp.src_weight[j] = w * w;
    }

    DenseMatrix b = rp.t_matrix;
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (int j = 0; j < count; ++j) b(i, j) /= std::sqrt(rp.src_weight[j]);
    const SvdResult r = svd_one_sided(b);
    rp.sv = {r.sigma, r.u, r.v};
    return rp;
}

RungeApprox runge_approximate(const RungeProblem& rp, const RegionField& w, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("runge_approximate: alpha > 0 required");
    const std::size_t na = rp.t_matrix.rows();
    if (w.v.size() != na) throw std::invalid_argument("runge_approximate: target size mismatch");
    const double sq_vol = std::sqrt(w.region.geom.cell_volume());

    std::vector<double> what(na);
    for (std::size_t i = 0; i < na; ++i) what[i] = w.v[i] * sq_vol;

    const int rank = static_cast<int>(rp.sv.sigma.size());
    RungeApprox out;
    out.target_norm = norm2(what);

    // expansion in left singular vectors, modes kept while sigma_j >= alpha
    std::vector<double> xhat(rank, 0.0);
    double fnorm_sq = 0.0;
    int kept = 0;
    for (int j = 0; j < rank; ++j) {
        if (!(rp.sv.sigma[j] >= alpha) || rp.sv.sigma[j] <= 0.0) break;
        double beta = 0.0;
        for (std::size_t i = 0; i < na; ++i) beta += rp.sv.u(i, j) * what[i];
        const double q = beta / rp.sv.sigma[j];
        fnorm_sq += q * q;
        for (int p = 0; p < rank; ++p) xhat[p] += q * rp.sv.v(p, j);
        ++kept;
    }
    out.kept = kept;
    out.source_norm = std::sqrt(fnorm_sq);

    // back to dictionary coordinates and nodal fields
    std::vector<double> x(rank);
    for (int p = 0; p < rank; ++p) x[p] = xhat[p] / std::sqrt(rp.src_weight[p]);
    out.f = ScalarField(rp.dict.elements.front().geom);
    for (int p = 0; p < rank; ++p)
        if (x[p] != 0.0)
            for (std::size_t i = 0; i < out.f.v.size(); ++i)
                out.f.v[i] += x[p] * rp.dict.elements[p].v[i];

    std::vector<double> resid = what;
    for (std::size_t i = 0; i < na; ++i) {
        double ti = 0.0;
        for (int p = 0; p < rank; ++p) ti += rp.t_matrix(i, p) * x[p];
        resid[i] -= ti;
    }
    out.error = norm2(resid);
    return out;
}

std::vector<RegionField> harmonic_targets(const Metric& m, const Region& a_plus,
                                          const Region& a_region) {
    std::vector<RegionField> out;
    const Geometry& g = m.geom;
    const auto a_idx = a_region.node_indices();

    RegionField ones;
    ones.region = a_region;
    ones.v.assign(a_idx.size(), 1.0);  // a-harmonic for any a
    out.push_back(ones);

    if (g.dim() == 1) {
        // w(x) = int_p^x dz / a(z), midpoint-accumulated over A_plus cells
        std::vector<double> cum(g.node_count(), 0.0);
        double acc = 0.0;
        for (int i = a_plus.lo[0]; i <= a_plus.hi[0]; ++i) {
            acc += g.h(0) / m.a[i];
            cum[i] = acc - 0.5 * g.h(0) / m.a[i];
        }
        RegionField lin;
        lin.region = a_region;
        lin.v.resize(a_idx.size());
        for (std::size_t q = 0; q < a_idx.size(); ++q) lin.v[q] = cum[a_idx[q]];
        out.push_back(lin);
        RegionField mix;
        mix.region = a_region;
        mix.v.resize(a_idx.size());
        for (std::size_t q = 0; q < a_idx.size(); ++q) mix.v[q] = 1.0 - 2.0 * cum[a_idx[q]];
        out.push_back(mix);
    } else {
        for (int ax = 0; ax < 2; ++ax) {
            RegionField plane;
            plane.region = a_region;
            plane.v.resize(a_idx.size());
            for (std::size_t q = 0; q < a_idx.size(); ++q) {
                const int i = a_idx[q] % g.n_nodes[0], j = a_idx[q] / g.n_nodes[0];
                plane.v[q] = ax == 0 ? g.coord(0, i) : g.coord(1, j);
            }
            out.push_back(plane);
        }
    }
    return out;
}

RungeTradeoff runge_tradeoff_table(const RungeProblem& rp,
                                   const std::vector<RegionField>& targets,
                                   const std::vector<double>& eps_schedule) {
    const std::size_t na = rp.t_matrix.rows();
    const int rank = static_cast<int>(rp.sv.sigma.size());
    const double sq_vol = std::sqrt(rp.A.geom.cell_volume());

    // per target: prefix errors and source norms over the sigma ladder
    struct Ladder {
        std::vector<double> err, fnorm;  // index = kept count
        double wnorm;
    };
    std::vector<Ladder> ladders;
    for (const auto& w : targets) {
        std::vector<double> what(na);
        for (std::size_t i = 0; i < na; ++i) what[i] = w.v[i] * sq_vol;
        Ladder lad;
        lad.wnorm = norm2(what);
        std::vector<double> resid = what;
        double fsq = 0.0;
        lad.err.push_back(norm2(resid));
        lad.fnorm.push_back(0.0);
        for (int j = 0; j < rank && rp.sv.sigma[j] > 0.0; ++j) {
            double beta = 0.0;
            for (std::size_t i = 0; i < na; ++i) beta += rp.sv.u(i, j) * what[i];
            for (std::size_t i = 0; i < na; ++i) resid[i] -= beta * rp.sv.u(i, j);
            fsq += (beta / rp.sv.sigma[j]) * (beta / rp.sv.sigma[j]);
            lad.err.push_back(norm2(resid));
            lad.fnorm.push_back(std::sqrt(fsq));
        }
        ladders.push_back(std::move(lad));
    }

    RungeTradeoff out;
    for (double eps : eps_schedule) {
        RungeTradeoffRow row;
        row.eps = eps;
        row.alpha = 2.0 * (rank > 0 ? rp.sv.sigma[0] : 1.0);
        for (const auto& lad : ladders) {
            std::size_t m = 0;
            bool ok = false;
            for (; m < lad.err.size(); ++m)
                if (lad.err[m] <= eps * lad.wnorm) { ok = true; break; }
            if (!ok) { row.reachable = false; m = lad.err.size() - 1; }
            row.achieved = std::max(row.achieved, lad.wnorm > 0.0 ? lad.err[m] / lad.wnorm : 0.0);
            row.source_norm = std::max(row.source_norm, lad.fnorm[m]);
            if (m >= 1) row.alpha = std::min(row.alpha, rp.sv.sigma[m - 1]);
        }
        out.rows.push_back(row);
    }

    std::vector<double> lx, ly;
    for (const auto& r : out.rows)
        if (r.reachable && r.source_norm > 0.0) {
            lx.push_back(std::log(1.0 / r.eps));
            ly.push_back(std::log(r.source_norm));
        }
    if (lx.size() >= 2) {
        const LineFit f = fit_line(lx, ly);
        out.mu_fit = f.slope;
        out.mu_correlation = f.correlation;
    }
    return out;
}

namespace {

// boundary faces of a region box, ordered as one cycle: bottom, right, top, left
struct BoxFace {
    int cell;    // flat ambient index of the adjacent cell
    int axis;    // 0 = x face, 1 = y face
};

std::vector<BoxFace> boundary_faces(const Region& r) {
    std::vector<BoxFace> f;
    const Geometry& g = r.geom;
    if (g.dim() == 1) {
        f.push_back({r.lo[0], 0});
        f.push_back({r.hi[0], 0});
        return f;
    }
    const int nx = g.n_nodes[0];
    for (int i = r.lo[0]; i <= r.hi[0]; ++i) f.push_back({r.lo[1] * nx + i, 1});
    for (int j = r.lo[1]; j <= r.hi[1]; ++j) f.push_back({j * nx + r.hi[0], 0});
    for (int i = r.hi[0]; i >= r.lo[0]; --i) f.push_back({r.hi[1] * nx + i, 1});
    for (int j = r.hi[1]; j >= r.lo[1]; --j) f.push_back({j * nx + r.lo[0], 0});
    return f;
}

struct BoxSystem {
    std::vector<int> cells;          // flat ambient indices
    std::vector<int> local;          // ambient -> local (-1 outside)
    DenseMatrix energy;              // local energy form (interior-interior block)
    std::vector<BoxFace> faces;
    std::vector<double> face_coef;   // 2 a (transverse / distance) per boundary face
    std::size_t bandwidth;
};

BoxSystem build_box(const Metric& m, const Region& box) {
    const Geometry& g = m.geom;
    BoxSystem bs;
    bs.cells = box.node_indices();
    bs.local.assign(g.node_count(), -1);
    for (std::size_t q = 0; q < bs.cells.size(); ++q) bs.local[bs.cells[q]] = static_cast<int>(q);
    const int n_loc = static_cast<int>(bs.cells.size());
    bs.energy = DenseMatrix(n_loc, n_loc);
    bs.faces = boundary_faces(box);

    if (g.dim() == 1) {
        const double h = g.h(0);
        bs.bandwidth = 1;
        for (int i = box.lo[0]; i < box.hi[0]; ++i) {
            const double af = 0.5 * (m.a[i] + m.a[i + 1]);
            const int p = bs.local[i], q = bs.local[i + 1];
            bs.energy(p, p) += af / h;
            bs.energy(q, q) += af / h;
            bs.energy(p, q) -= af / h;
            bs.energy(q, p) -= af / h;
        }
        for (const auto& f : bs.faces) {
            const double c = 2.0 * m.a[f.cell] / h;
            bs.energy(bs.local[f.cell], bs.local[f.cell]) += c;
            bs.face_coef.push_back(c);
        }
        return bs;
    }

    const int nx = g.n_nodes[0];
    const double hx = g.h(0), hy = g.h(1);
    bs.bandwidth = static_cast<std::size_t>(box.extent_nodes(0)) + 1;
    auto inside = [&](int i, int j) {
        return i >= box.lo[0] && i <= box.hi[0] && j >= box.lo[1] && j <= box.hi[1];
    };
    for (int j = box.lo[1]; j <= box.hi[1]; ++j)
        for (int i = box.lo[0]; i <= box.hi[0]; ++i) {
            const int p = bs.local[j * nx + i];
            if (i + 1 <= box.hi[0]) {
                const double af = 0.5 * (m.tensor_at(j * nx + i)[0] + m.tensor_at(j * nx + i + 1)[0]);
                const double w = af * hy / hx;
                const int q = bs.local[j * nx + i + 1];
                bs.energy(p, p) += w; bs.energy(q, q) += w;
                bs.energy(p, q) -= w; bs.energy(q, p) -= w;
            }
            if (j + 1 <= box.hi[1]) {
                const double af = 0.5 * (m.tensor_at(j * nx + i)[2] + m.tensor_at((j + 1) * nx + i)[2]);
                const double w = af * hx / hy;
                const int q = bs.local[(j + 1) * nx + i];
                bs.energy(p, p) += w; bs.energy(q, q) += w;
                bs.energy(p, q) -= w; bs.energy(q, p) -= w;
            }
            const double a12 = m.tensor_at(j * nx + i)[1];
            if (a12 != 0.0) {
                // anisotropy must stay strictly inside the box so the centered
                // cross stencil never touches the Dirichlet data
                if (!inside(i - 1, j) || !inside(i + 1, j) || !inside(i, j - 1) ||
                    !inside(i, j + 1))
                    throw std::invalid_argument(
                        "dtn: anisotropic coefficient touches the box boundary");
                const double cx = 1.0 / (2.0 * hx), cy = 1.0 / (2.0 * hy);
                const int xs[2] = {i - 1, i + 1};
                const double xc[2] = {-cx, cx};
                const int ys[2] = {j - 1, j + 1};
                const double yc[2] = {-cy, cy};
                for (int u = 0; u < 2; ++u)
                    for (int v = 0; v < 2; ++v) {
                        const int pu = bs.local[j * nx + xs[u]];
                        const int pv = bs.local[ys[v] * nx + i];
                        bs.energy(pu, pv) += a12 * hx * hy * xc[u] * yc[v];
                        bs.energy(pv, pu) += a12 * hx * hy * xc[u] * yc[v];
                    }
            }
        }
    for (const auto& f : bs.faces) {
        const double a_diag = f.axis == 0 ? m.tensor_at(f.cell)[0] : m.tensor_at(f.cell)[2];
        const double c = f.axis == 0 ? 2.0 * a_diag * hy / hx : 2.0 * a_diag * hx / hy;
        bs.energy(bs.local[f.cell], bs.local[f.cell]) += c;
        bs.face_coef.push_back(c);
    }
    return bs;
}

std::vector<double> box_solve(const BoxSystem& bs, const std::vector<double>& g_face) {
    std::vector<double> rhs(bs.cells.size(), 0.0);
    for (std::size_t f = 0; f < bs.faces.size(); ++f)
        rhs[bs.local[bs.faces[f].cell]] += bs.face_coef[f] * g_face[f];
    BandedCholesky chol(bs.energy, bs.bandwidth);
    return chol.solve(rhs);
}

}  // namespace

DtNMatrix build_dtn(const Metric& m, const Region& a_plus) {
    m.validate();
    BoxSystem bs = build_box(m, a_plus);
    const std::size_t nf = bs.faces.size();

    // solve once per boundary basis vector, then pair with the zero-inside
    // extension of every test vector: E(w^{g_j}, e^{g_i})
    BandedCholesky chol(bs.energy, bs.bandwidth);
    DenseMatrix lam(nf, nf);
    for (std::size_t j = 0; j < nf; ++j) {
        std::vector<double> rhs(bs.cells.size(), 0.0);
        rhs[bs.local[bs.faces[j].cell]] += bs.face_coef[j];
        const std::vector<double> w = chol.solve(rhs);
        for (std::size_t i = 0; i < nf; ++i) {
            // face term: coef * (w_adj - g_w) * (0 - g_e) with g_e = delta_i
            const double wadj = w[bs.local[bs.faces[i].cell]];
            const double gw = i == j ? 1.0 : 0.0;
            lam(i, j) = -bs.face_coef[i] * (wadj - gw);
        }
    }

    DtNMatrix out;
    out.a_plus = a_plus;
    out.asym_defect = lam.symmetry_defect();
    out.lambda = DenseMatrix(nf, nf);
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = 0; j < nf; ++j) out.lambda(i, j) = 0.5 * (lam(i, j) + lam(j, i));

    // cycle Fourier basis; 1D degenerates to the identity with zero frequency
    out.fourier = DenseMatrix(nf, nf);
    out.freq.assign(nf, 0.0);
    if (m.geom.dim() == 1) {
        out.fourier = DenseMatrix::identity(nf);
    } else {
        const double p = static_cast<double>(nf);
        std::size_t col = 0;
        for (std::size_t q = 0; q < nf; ++q) out.fourier(q, col) = 1.0 / std::sqrt(p);
        out.freq[col++] = 0.0;
        for (std::size_t mfreq = 1; col < nf; ++mfreq) {
            if (2 * mfreq == nf) {
                // at the Nyquist frequency the cosine vanishes on the
                // half-integer lattice; the alternating mode survives alone
                for (std::size_t q = 0; q < nf; ++q)
                    out.fourier(q, col) = (q % 2 == 0 ? 1.0 : -1.0) / std::sqrt(p);
                out.freq[col++] = static_cast<double>(mfreq);
                continue;
            }
            for (std::size_t q = 0; q < nf; ++q)
                out.fourier(q, col) =
                    std::sqrt(2.0 / p) * std::cos(2.0 * M_PI * mfreq * (q + 0.5) / p);
            out.freq[col++] = static_cast<double>(mfreq);
            if (col >= nf) break;
            for (std::size_t q = 0; q < nf; ++q)
                out.fourier(q, col) =
                    std::sqrt(2.0 / p) * std::sin(2.0 * M_PI * mfreq * (q + 0.5) / p);
            out.freq[col++] = static_cast<double>(mfreq);
        }
    }
    return out;
}

double dtn_norm_diff(const DtNMatrix& a, const DtNMatrix& b) {
    if (a.lambda.rows() != b.lambda.rows())
        throw std::invalid_argument("dtn_norm_diff: dimension mismatch");
    const std::size_t nf = a.lambda.rows();
    const DenseMatrix d = a.lambda - b.lambda;
    // transform to the Fourier basis and apply (1+m^2)^{-1/4} on both sides
    DenseMatrix t(nf, nf);
    for (std::size_t i = 0; i < nf; ++i)
        for (std::size_t j = 0; j < nf; ++j) {
            double s = 0.0;
            for (std::size_t q = 0; q < nf; ++q)
                for (std::size_t r = 0; r < nf; ++r)
                    s += a.fourier(q, i) * d(q, r) * a.fourier(r, j);
            t(i, j) = s / (std::pow(1.0 + a.freq[i] * a.freq[i], 0.25) *
                           std::pow(1.0 + a.freq[j] * a.freq[j], 0.25));
        }
    const SvdResult r = svd_one_sided(t);
    return r.sigma.empty() ? 0.0 : r.sigma[0];
}

namespace {

void check_metrics_agree_outside(const Metric& a1, const Metric& a2, const Region& a_region) {
    if (!a1.geom.same_grid(a2.geom))
        throw std::invalid_argument("alessandrini: metrics on different grids");
    const int n = a1.geom.node_count();
    for (int i = 0; i < n; ++i) {
        if (a_region.contains_flat(i)) continue;
        for (int c = 0; c < a1.comps; ++c)
            if (a1.a[a1.comps * i + c] != a2.a[a2.comps * i + c])
                throw std::invalid_argument("alessandrini: metrics differ outside A");
    }
}

// cell-centered gradient by centered differences (one-sided at domain edges)
std::vector<std::array<double, 2>> cell_gradient(const Geometry& g,
                                                 const std::vector<double>& v) {
    const int n = g.node_count();
    std::vector<std::array<double, 2>> grad(n, {0.0, 0.0});
    if (g.dim() == 1) {
        const double h = g.h(0);
        for (int i = 0; i < n; ++i) {
            const int im = i > 0 ? i - 1 : i, ip = i < n - 1 ? i + 1 : i;
            grad[i][0] = (v[ip] - v[im]) / ((ip - im) * h);
        }
        return grad;
    }
    const int nx = g.n_nodes[0], ny = g.n_nodes[1];
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int im = i > 0 ? i - 1 : i, ip = i < nx - 1 ? i + 1 : i;
            const int jm = j > 0 ? j - 1 : j, jp = j < ny - 1 ? j + 1 : j;
            grad[j * nx + i][0] = (v[j * nx + ip] - v[j * nx + im]) / ((ip - im) * g.h(0));
            grad[j * nx + i][1] = (v[jp * nx + i] - v[jm * nx + i]) / ((jp - jm) * g.h(1));
        }
    return grad;
}

double gradient_pairing(const Geometry& g, const Metric& m1, const Metric& m2, double sign,
                        const std::vector<double>& v1, const std::vector<double>& v2) {
    const auto g1 = cell_gradient(g, v1);
    const auto g2 = cell_gradient(g, v2);
    const double vol = g.cell_volume();
    double acc = 0.0;
    const int n = g.node_count();
    for (int i = 0; i < n; ++i) {
        if (m1.comps == 1) {
            const double da = sign * (m2.a[i] - m1.a[i]);
            if (da == 0.0) continue;
            acc += da * g1[i][0] * g2[i][0] * vol;
        } else {
            const auto t1 = m1.tensor_at(i), t2 = m2.tensor_at(i);
            const double d11 = sign * (t2[0] - t1[0]);
            const double d12 = sign * (t2[1] - t1[1]);
            const double d22 = sign * (t2[2] - t1[2]);
            if (d11 == 0.0 && d12 == 0.0 && d22 == 0.0) continue;
            acc += (g1[i][0] * (d11 * g2[i][0] + d12 * g2[i][1]) +
                    g1[i][1] * (d12 * g2[i][0] + d22 * g2[i][1])) *
                   vol;
        }
    }
    return acc;
}

}  // namespace

AlessandriniResult alessandrini_residual(const Metric& a1, const Metric& a2,
                                         AlessandriniMode mode, const Region& a_region,
                                         const ScalarField& in1, const ScalarField& in2,
                                         const Region* a_plus, const std::vector<double>* g1,
                                         const std::vector<double>* g2) {
    check_metrics_agree_outside(a1, a2, a_region);
    AlessandriniResult out;
    const Geometry& g = a1.geom;

    if (mode == AlessandriniMode::sts) {
        const ScalarField v1 = poisson_solve(a1, in1);
        const ScalarField v2_f1 = poisson_solve(a2, in1);
        const ScalarField v2_f2 = poisson_solve(a2, in2);
        double lhs = 0.0;
        for (std::size_t i = 0; i < v1.v.size(); ++i) lhs += (v1.v[i] - v2_f1.v[i]) * in2.v[i];
        out.lhs = lhs * g.cell_volume();
        out.rhs = gradient_pairing(g, a1, a2, +1.0, v1.v, v2_f2.v);
    } else {
        if (!a_plus || !g1 || !g2)
            throw std::invalid_argument("alessandrini: dtn mode needs A_plus and boundary data");
        const DtNMatrix l1 = build_dtn(a1, *a_plus);
        const DtNMatrix l2 = build_dtn(a2, *a_plus);
        const std::size_t nf = l1.lambda.rows();
        if (g1->size() != nf || g2->size() != nf)
            throw std::invalid_argument("alessandrini: boundary data size mismatch");
        double lhs = 0.0;
        for (std::size_t i = 0; i < nf; ++i)
            for (std::size_t j = 0; j < nf; ++j)
                lhs += (*g2)[i] * (l1.lambda(i, j) - l2.lambda(i, j)) * (*g1)[j];
        out.lhs = lhs;

        const BoxSystem b1 = build_box(a1, *a_plus);
        const BoxSystem b2 = build_box(a2, *a_plus);
        const std::vector<double> w1 = box_solve(b1, *g1);
        const std::vector<double> w2 = box_solve(b2, *g2);
        // lift to ambient fields (zero outside) for the gradient pairing; the
        // difference support sits strictly inside A so the lift is harmless
        std::vector<double> w1f(g.node_count(), 0.0), w2f(g.node_count(), 0.0);
        for (std::size_t q = 0; q < b1.cells.size(); ++q) {
            w1f[b1.cells[q]] = w1[q];
            w2f[b2.cells[q]] = w2[q];
        }
        out.rhs = gradient_pairing(g, a1, a2, -1.0, w1f, w2f);
    }
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

namespace {

struct FamilyContext {
    std::shared_ptr<const EigenBasis> ref_basis;
    OperatorMatrix m1_id, ms_id;
    DtNMatrix dtn_id;
};

}  // namespace

StsDtnResult sts_vs_dtn_experiment(const FamilySpec& spec) {
    for (std::size_t i = 1; i < spec.taus.size(); ++i)
        if (!(spec.taus[i] < spec.taus[i - 1]))
            throw std::invalid_argument("sts_vs_dtn: tau schedule must decrease");

    const Metric id = Metric::identity(spec.geom);
    const auto ref = std::make_shared<EigenBasis>(discrete_basis(id, spec.K));
    const SourceDict dict_id = make_source_dict(ref, spec.O, spec.J);
    const OperatorMatrix m1_id = build_sts_matrix(1.0, dict_id, spec.O, -1.0, 1.0, ref);
    const DtNMatrix dtn_id = build_dtn(id, spec.A_plus);

    StsDtnResult out;
    out.rows.resize(spec.taus.size());
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < static_cast<int>(spec.taus.size()); ++r) {
        const double tau = spec.taus[r];
        Metric m = bump_metric(spec.geom, spec.A, tau);
        m.validate_a3(spec.A);
        const auto basis = std::make_shared<EigenBasis>(discrete_basis(m, spec.K));
        const SourceDict dict = make_source_dict(basis, spec.O, spec.J);
        const OperatorMatrix m1 = build_sts_matrix(1.0, dict, spec.O, -1.0, 1.0, ref);
        const DtNMatrix dtn = build_dtn(m, spec.A_plus);
        out.rows[r] = {tau, operator_norm_diff(m1, m1_id), dtn_norm_diff(dtn, dtn_id)};
    }

    std::vector<double> lx, ly;
    out.c_fit = 0.0;
    for (const auto& row : out.rows) {
        if (row.d_l1 > 0.0 && row.d_lam > 0.0) {
            lx.push_back(std::log(row.d_l1));
            ly.push_back(std::log(row.d_lam));
            out.c_fit = std::max(out.c_fit, row.d_l1 / row.d_lam);
        }
    }
    if (lx.size() >= 2) {
        const LineFit f = fit_line(lx, ly);
        out.gamma_fit = f.slope;
        out.gamma_correlation = f.correlation;
    }
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        if (!(out.rows[i].d_l1 < out.rows[i - 1].d_l1)) out.l1_monotone = false;
        if (!(out.rows[i].d_lam < out.rows[i - 1].d_lam)) out.lam_monotone = false;
    }
    return out;
}

TransferResult stability_transfer_experiment(double s, const FamilySpec& spec,
                                             std::vector<double> beta_grid) {
    for (std::size_t i = 1; i < spec.taus.size(); ++i)
        if (!(spec.taus[i] < spec.taus[i - 1]))
            throw std::invalid_argument("stability_transfer: tau schedule must decrease");

    const Metric id = Metric::identity(spec.geom);
    const auto ref = std::make_shared<EigenBasis>(discrete_basis(id, spec.K));
    const SourceDict dict_id = make_source_dict(ref, spec.O, spec.J);
    const OperatorMatrix ms_id = build_sts_matrix(s, dict_id, spec.O, -s, s, ref);
    const OperatorMatrix m1_id = build_sts_matrix(1.0, dict_id, spec.O, -1.0, 1.0, ref);

    TransferResult out;
    out.beta_grid = std::move(beta_grid);
    out.rows.resize(spec.taus.size());
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < static_cast<int>(spec.taus.size()); ++r) {
        const double tau = spec.taus[r];
        Metric m = bump_metric(spec.geom, spec.A, tau);
        m.validate_a3(spec.A);
        const auto basis = std::make_shared<EigenBasis>(discrete_basis(m, spec.K));
        const SourceDict dict = make_source_dict(basis, spec.O, spec.J);
        const OperatorMatrix ms = build_sts_matrix(s, dict, spec.O, -s, s, ref);
        const OperatorMatrix m1 = build_sts_matrix(1.0, dict, spec.O, -1.0, 1.0, ref);
        TransferRow row;
        row.tau = tau;
        row.eps_s = operator_norm_diff(ms, ms_id);
        row.delta1 = operator_norm_diff(m1, m1_id);
        row.excluded = row.eps_s >= 0.5;  // outside the small-data regime eps in (0, 1/2)
        out.rows[r] = row;
    }

    out.beta_sup.assign(out.beta_grid.size(), 0.0);
    std::vector<double> lx, ly;
    double prev_eps = -1.0, prev_d1 = -1.0;
    bool first = true;
    for (const auto& row : out.rows) {
        if (row.excluded) continue;
        if (!first) {
            if (!(row.eps_s < prev_eps) || !(row.delta1 < prev_d1)) out.covanishing = false;
        }
        prev_eps = row.eps_s;
        prev_d1 = row.delta1;
        first = false;
        if (row.eps_s > 0.0 && row.delta1 > 0.0) {
            const double le = std::abs(std::log(row.eps_s));
            for (std::size_t b = 0; b < out.beta_grid.size(); ++b)
                out.beta_sup[b] = std::max(out.beta_sup[b],
                                           row.delta1 * std::pow(le, out.beta_grid[b]));
            lx.push_back(std::log(row.eps_s));
            ly.push_back(std::log(row.delta1));
        }
    }
    if (lx.size() >= 2) out.alg_fit_p = fit_line(lx, ly).slope;
    return out;
}

}  // namespace fraclab
