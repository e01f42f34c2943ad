#include "fraclab/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab {

namespace {

void check_axis(double length, int n) {
    if (!(length > 0.0)) throw std::invalid_argument("geometry: extent must be positive");
    if (n < 8) throw std::invalid_argument("geometry: n_nodes >= 8 per axis required");
}

}  // namespace

Geometry Geometry::interval(double length, int n) {
    check_axis(length, n);
    Geometry g;
    g.kind = GeomKind::interval;
    g.extent = {length, 0.0};
    g.n_nodes = {n, 0};
    return g;
}

Geometry Geometry::rectangle(double lx, double ly, int nx, int ny) {
    check_axis(lx, nx);
    check_axis(ly, ny);
    Geometry g;
    g.kind = GeomKind::rectangle;
    g.extent = {lx, ly};
    g.n_nodes = {nx, ny};
    return g;
}

Geometry Geometry::circle(double circumference, int n) {
    check_axis(circumference, n);
    Geometry g;
    g.kind = GeomKind::circle;
    g.extent = {circumference, 0.0};
    g.n_nodes = {n, 0};
    return g;
}

bool Geometry::same_grid(const Geometry& o) const {
    return kind == o.kind && n_nodes == o.n_nodes && extent == o.extent;
}

std::string region_label_name(RegionLabel l) {
    switch (l) {
        case RegionLabel::O: return "O";
        case RegionLabel::O_plus: return "O_plus";
        case RegionLabel::A: return "A";
        case RegionLabel::A_plus: return "A_plus";
        case RegionLabel::O_prime: return "O_prime";
    }
    return "?";
}

Region Region::from_index_box(const Geometry& g, RegionLabel label, int i0, int i1, int j0,
                              int j1) {
    Region r;
    r.geom = g;
    r.label = label;
    r.lo = {i0, j0};
    r.hi = {i1, j1};
    const int margin = g.boundary() == BoundaryKind::dirichlet ? 1 : 0;
    for (int ax = 0; ax < g.dim(); ++ax) {
        if (r.lo[ax] > r.hi[ax]) throw std::invalid_argument("region: empty index box");
        if (r.lo[ax] < margin || r.hi[ax] > g.n_nodes[ax] - 1 - margin)
            throw std::invalid_argument("region: box not strictly interior");
    }
    if (g.dim() == 1) { r.lo[1] = 0; r.hi[1] = 0; }
    return r;
}

Region Region::from_coords(const Geometry& g, RegionLabel label, double x0, double x1, double y0,
                           double y1) {
    auto axis_box = [&](int ax, double a, double b) -> std::array<int, 2> {
        if (!(a < b)) throw std::invalid_argument("region: empty coordinate range");
        int lo = static_cast<int>(std::ceil(a / g.h(ax) - 0.5 + 1e-12));
        int hi = static_cast<int>(std::floor(b / g.h(ax) - 0.5 - 1e-12));
        return {lo, hi};
    };
    auto bx = axis_box(0, x0, x1);
    std::array<int, 2> by{0, 0};
    if (g.dim() == 2) by = axis_box(1, y0, y1);
    return from_index_box(g, label, bx[0], bx[1], by[0], by[1]);
}

int Region::node_count() const {
    int c = extent_nodes(0);
    if (geom.dim() == 2) c *= extent_nodes(1);
    return c;
}

std::vector<int> Region::node_indices() const {
    std::vector<int> out;
    out.reserve(node_count());
    if (geom.dim() == 1) {
        for (int i = lo[0]; i <= hi[0]; ++i) out.push_back(i);
    } else {
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int i = lo[0]; i <= hi[0]; ++i) out.push_back(j * geom.n_nodes[0] + i);
    }
    return out;
}

bool Region::contains_flat(int idx) const {
    if (geom.dim() == 1) return idx >= lo[0] && idx <= hi[0];
    const int i = idx % geom.n_nodes[0];
    const int j = idx / geom.n_nodes[0];
    return i >= lo[0] && i <= hi[0] && j >= lo[1] && j <= hi[1];
}

bool regions_disjoint(const Region& a, const Region& b) {
    for (int ax = 0; ax < a.geom.dim(); ++ax)
        if (a.hi[ax] < b.lo[ax] || b.hi[ax] < a.lo[ax]) return true;
    return false;
}

bool region_strictly_inside(const Region& a, const Region& b) {
    for (int ax = 0; ax < a.geom.dim(); ++ax)
        if (!(a.lo[ax] > b.lo[ax] && a.hi[ax] < b.hi[ax])) return false;
    return true;
}

ScalarField::ScalarField(const Geometry& g, std::vector<double> values)
    : geom(g), v(std::move(values)) {
    if (static_cast<int>(v.size()) != g.node_count())
        throw std::invalid_argument("scalar field: value count does not match grid");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("scalar field: non-finite value");
}

double inner_product_l2(const ScalarField& u, const ScalarField& w) {
    if (!u.geom.same_grid(w.geom))
        throw std::invalid_argument("inner_product_l2: geometry mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.v.size(); ++i) s += u.v[i] * w.v[i];
    return s * u.geom.cell_volume();
}

double norm_l2(const ScalarField& u) { return std::sqrt(inner_product_l2(u, u)); }

double mean_value(const ScalarField& u) {
    double s = 0.0;
    for (double x : u.v) s += x;
    return s * u.geom.cell_volume() /
           (u.geom.dim() == 2 ? u.geom.extent[0] * u.geom.extent[1] : u.geom.extent[0]);
}

RegionField restrict_to(const ScalarField& u, const Region& r) {
    if (!u.geom.same_grid(r.geom)) throw std::invalid_argument("restrict: geometry mismatch");
    RegionField w;
    w.region = r;
    const auto idx = r.node_indices();
    w.v.resize(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) w.v[k] = u.v[idx[k]];
    return w;
}

ScalarField extend_by_zero(const RegionField& w) {
    ScalarField u(w.region.geom);
    const auto idx = w.region.node_indices();
    if (idx.size() != w.v.size())
        throw std::invalid_argument("extend_by_zero: region field size mismatch");
    for (std::size_t k = 0; k < idx.size(); ++k) u.v[idx[k]] = w.v[k];
    return u;
}

double inner_product_region(const RegionField& a, const RegionField& b) {
    if (a.v.size() != b.v.size())
        throw std::invalid_argument("inner_product_region: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return s * a.region.geom.cell_volume();
}

double norm_region(const RegionField& a) { return std::sqrt(inner_product_region(a, a)); }

Metric Metric::identity(const Geometry& g, double theta1, double theta2) {
    Metric m;
    m.geom = g;
    m.theta1 = theta1;
    m.theta2 = theta2;
    m.comps = g.dim() == 2 ? 3 : 1;
    const int n = g.node_count();
    if (m.comps == 1) {
        m.a.assign(n, 1.0);
    } else {
        m.a.assign(3 * n, 0.0);
        for (int i = 0; i < n; ++i) { m.a[3 * i] = 1.0; m.a[3 * i + 2] = 1.0; }
    }
    return m;
}

void Metric::validate() const {
    if (!(theta1 > 0.0 && theta1 < 1.0))
        throw std::invalid_argument("metric: theta1 must lie in (0,1)");
    const int n = geom.node_count();
    if (static_cast<int>(a.size()) != comps * n)
        throw std::invalid_argument("metric: coefficient count does not match grid");
    const double lo = theta1, hi = 1.0 / theta1;
    for (int i = 0; i < n; ++i) {
        double emin, emax;
        if (comps == 1) {
            emin = emax = a[i];
        } else {
            const double a11 = a[3 * i], a12 = a[3 * i + 1], a22 = a[3 * i + 2];
            const double tr = 0.5 * (a11 + a22);
            const double d = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
            emin = tr - d;
            emax = tr + d;
        }
        if (!(emin >= lo - 1e-14 && emax <= hi + 1e-14))
            throw std::invalid_argument("metric: theta1 ellipticity sandwich violated at a node");
    }
}

void Metric::validate_a3(const Region& a_region, double tol) const {
    const int n = geom.node_count();
    for (int i = 0; i < n; ++i) {
        if (a_region.contains_flat(i)) continue;
        double defect;
        if (comps == 1) {
            defect = std::abs(a[i] - 1.0);
        } else {
            defect = std::max({std::abs(a[3 * i] - 1.0), std::abs(a[3 * i + 1]),
                               std::abs(a[3 * i + 2] - 1.0)});
        }
        if (defect > tol)
            throw std::invalid_argument("metric: (A3') violated, a != Id outside A");
    }
}

Metric bump_metric(const Geometry& g, const Region& bump_region, double tau) {
    Metric m = Metric::identity(g);
    auto bump1d = [&](int ax, double x) {
        const double a = bump_region.face_lo(ax), b = bump_region.face_hi(ax);
        if (x <= a || x >= b) return 0.0;
        const double t = (x - a) / (b - a);
        const double c = 0.5 * (1.0 - std::cos(2.0 * M_PI * t));
        return c;  // vanishes with its first derivative at the faces
    };
    const int n = g.node_count();
    for (int idx = 0; idx < n; ++idx) {
        double b;
        if (g.dim() == 1) {
            b = bump1d(0, g.coord(0, idx));
        } else {
            const int i = idx % g.n_nodes[0], j = idx / g.n_nodes[0];
            b = bump1d(0, g.coord(0, i)) * bump1d(1, g.coord(1, j));
        }
        if (m.comps == 1) {
            m.a[idx] += tau * b;
        } else {
            m.a[3 * idx] += tau * b;
            m.a[3 * idx + 2] += tau * b;
        }
    }
    // theta1 wide enough for the whole family |tau| <= 1/2
    m.theta1 = 0.5;
    m.theta2 = std::abs(tau) * 2.0 * M_PI /
                   std::min(bump_region.face_hi(0) - bump_region.face_lo(0), 1.0) +
               1e-12;
    return m;
}

}  // namespace fraclab
