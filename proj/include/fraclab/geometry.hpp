#pragma once

#include <array>
#include <string>
#include <vector>

namespace fraclab {

enum class GeomKind { interval, rectangle, circle };
enum class BoundaryKind { dirichlet, periodic };

/// Uniform cell-centered tensor grid. Nodes sit at cell midpoints
/// (i + 1/2) * h, so the quadrature weight per node is exactly the cell
/// volume and the midpoint rule is O(h^2) also for non-vanishing integrands.
struct Geometry {
    GeomKind kind = GeomKind::interval;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> n_nodes{0, 0};

    static Geometry interval(double length, int n);
    static Geometry rectangle(double lx, double ly, int nx, int ny);
    static Geometry circle(double circumference, int n);

    int dim() const { return kind == GeomKind::rectangle ? 2 : 1; }
    BoundaryKind boundary() const {
        return kind == GeomKind::circle ? BoundaryKind::periodic : BoundaryKind::dirichlet;
    }
    int node_count() const { return dim() == 2 ? n_nodes[0] * n_nodes[1] : n_nodes[0]; }
    double h(int axis = 0) const { return extent[axis] / n_nodes[axis]; }
    double cell_volume() const { return dim() == 2 ? h(0) * h(1) : h(0); }
    double coord(int axis, int i) const { return (i + 0.5) * h(axis); }

    bool same_grid(const Geometry& o) const;
};

enum class RegionLabel { O, O_plus, A, A_plus, O_prime };

std::string region_label_name(RegionLabel l);

/// Axis-aligned box of node indices (inclusive). On Dirichlet geometries a
/// region must keep at least one cell of margin to the domain boundary.
struct Region {
    Geometry geom;
    RegionLabel label = RegionLabel::O;
    std::array<int, 2> lo{0, 0};
    std::array<int, 2> hi{0, 0};

    static Region from_coords(const Geometry& g, RegionLabel label, double x0, double x1,
                              double y0 = 0.0, double y1 = 0.0);
    static Region from_index_box(const Geometry& g, RegionLabel label, int i0, int i1,
                                 int j0 = 0, int j1 = 0);

    int extent_nodes(int axis) const { return hi[axis] - lo[axis] + 1; }
    int node_count() const;
    std::vector<int> node_indices() const;  // flat ambient indices, row-major
    bool contains_flat(int idx) const;
    /// coordinates of the cell faces bounding the box (the natural sub-domain)
    double face_lo(int axis) const { return lo[axis] * geom.h(axis); }
    double face_hi(int axis) const { return (hi[axis] + 1) * geom.h(axis); }
};

bool regions_disjoint(const Region& a, const Region& b);
/// a compactly contained in b with at least one cell of slack on every side
bool region_strictly_inside(const Region& a, const Region& b);

struct ScalarField {
    Geometry geom;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Geometry& g) : geom(g), v(g.node_count(), 0.0) {}
    ScalarField(const Geometry& g, std::vector<double> values);
};

struct RegionField {
    Region region;
    std::vector<double> v;
};

double inner_product_l2(const ScalarField& u, const ScalarField& w);
double norm_l2(const ScalarField& u);
double mean_value(const ScalarField& u);

RegionField restrict_to(const ScalarField& u, const Region& r);
ScalarField extend_by_zero(const RegionField& w);

double inner_product_region(const RegionField& a, const RegionField& b);
double norm_region(const RegionField& a);

/// Coefficient field a(x): scalar per node in 1D, symmetric 2x2 per node in
/// 2D (stored a11, a12, a22). theta1 is the ellipticity constant of (A1').
struct Metric {
    Geometry geom;
    int comps = 1;  // 1 (scalar) or 3 (symmetric 2x2)
    std::vector<double> a;
    double theta1 = 0.5;
    double theta2 = 1.0;

    static Metric identity(const Geometry& g, double theta1 = 0.5, double theta2 = 1.0);

    double scalar_at(int idx) const { return a[idx]; }
    std::array<double, 3> tensor_at(int idx) const {
        return {a[3 * idx], a[3 * idx + 1], a[3 * idx + 2]};
    }

    /// theta1 |xi|^2 <= xi . a xi <= theta1^{-1} |xi|^2 at every node,
    /// via the closed-form eigenvalues of the 2x2 blocks in 2D.
    void validate() const;
    /// Checks a = Id outside A (the (A3') structure); throws on violation.
    void validate_a3(const Region& a_region, double tol = 0.0) const;
};

/// Id + tau * b(x) with b a C^1 tensor cosine bump supported strictly inside
/// bump_region; satisfies (A3') by construction.
Metric bump_metric(const Geometry& g, const Region& bump_region, double tau);

}  // namespace fraclab
