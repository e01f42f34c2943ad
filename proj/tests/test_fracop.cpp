#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "fraclab/fracop.hpp"
#include "fraclab/inverse.hpp"
#include "fraclab/rng.hpp"

using namespace fraclab;

namespace {

std::shared_ptr<const EigenBasis> interval_basis(int n = 256, int k = 24) {
    return std::make_shared<EigenBasis>(analytic_basis(Geometry::interval(M_PI, n), k));
}

}  // namespace

TEST_CASE("analyze picks out eigenfunction coordinates") {
    const auto b = interval_basis();
    const SpectralCoeffs c = analyze(b->field(2), b);
    for (int k = 0; k < b->size(); ++k)
        CHECK(std::abs(c.c[k] - (k == 2 ? 1.0 : 0.0)) <= 1e-10);
    const SpectralCoeffs zero = analyze(ScalarField(b->geom), b);
    for (double v : zero.c) CHECK(v == 0.0);
}

TEST_CASE("analyze/synthesize round trip on the span") {
    const auto b = interval_basis();
    SpectralCoeffs c;
    c.basis = b;
    c.c.assign(b->size(), 0.0);
    c.c[0] = 2.0;
    c.c[1] = -1.0;
    const ScalarField u = synthesize(c);
    const SpectralCoeffs back = analyze(u, b);
    double err2 = 0.0, ref2 = 0.0;
    for (int k = 0; k < b->size(); ++k) {
        err2 += (back.c[k] - c.c[k]) * (back.c[k] - c.c[k]);
        ref2 += c.c[k] * c.c[k];
    }
    CHECK(std::sqrt(err2 / ref2) <= 1e-8);
}

TEST_CASE("apply_frac on eigenfunctions and the semigroup property") {
    const auto b = interval_basis();
    std::mt19937_64 rng(5);
    SpectralCoeffs f;
    f.basis = b;
    f.c = uniform_pm1_vector(rng, b->size());

    // s = 0 is the identity
    const SpectralCoeffs id = apply_frac(0.0, f);
    for (int k = 0; k < b->size(); ++k) CHECK(id.c[k] == f.c[k]);

    // eigenfunction: lambda_k^s scaling
    SpectralCoeffs ek;
    ek.basis = b;
    ek.c.assign(b->size(), 0.0);
    ek.c[4] = 1.0;
    const SpectralCoeffs scaled = apply_frac(0.3, ek);
    CHECK(scaled.c[4] == doctest::Approx(std::pow(b->values[4], 0.3)).epsilon(1e-13));

    // 30 random (s, t): apply_frac(s) o apply_frac(t) = apply_frac(s + t)
    for (int trial = 0; trial < 30; ++trial) {
        const double s = 2.0 * uniform_pm1(rng), t = 2.0 * uniform_pm1(rng);
        const SpectralCoeffs a = apply_frac(s, apply_frac(t, f));
        const SpectralCoeffs c2 = apply_frac(s + t, f);
        for (int k = 0; k < b->size(); ++k)
            CHECK(a.c[k] == doctest::Approx(c2.c[k]).epsilon(1e-8));
    }

    // inverse composition recovers f
    const SpectralCoeffs round = apply_frac(0.5, apply_frac(-0.5, f));
    for (int k = 0; k < b->size(); ++k)
        CHECK(round.c[k] == doctest::Approx(f.c[k]).epsilon(1e-8));
}

TEST_CASE("solve_sts: eigenfunction source and the s = 1 Poisson oracle") {
    const auto b = interval_basis();
    SpectralCoeffs e1;
    e1.basis = b;
    e1.c.assign(b->size(), 0.0);
    e1.c[0] = 1.0;
    const SpectralCoeffs u = solve_sts(0.5, e1);
    CHECK(u.c[0] == doctest::Approx(std::pow(b->values[0], -0.5)).epsilon(1e-13));

    // s = 1 against the direct stiffness solve (independent route)
    const Geometry g = b->geom;
    const Region o = Region::from_coords(g, RegionLabel::O, 1.8, 2.6);
    const SourceDict dict = make_source_dict(b, o, 4);
    const ScalarField spectral = synthesize(solve_sts(1.0, dict.coeffs[1]));
    const ScalarField direct = poisson_solve(Metric::identity(g), dict.elements[1]);
    double err = 0.0, ref = 0.0;
    for (int i = 0; i < g.node_count(); ++i) {
        err += (spectral.v[i] - direct.v[i]) * (spectral.v[i] - direct.v[i]);
        ref += direct.v[i] * direct.v[i];
    }
    CHECK(std::sqrt(err / ref) <= 5e-3);  // discretization-level agreement
}

TEST_CASE("solve_sts on the circle: cos source is an eigenfunction") {
    const Geometry g = Geometry::circle(2 * M_PI, 128);
    const auto b = std::make_shared<EigenBasis>(analytic_basis(g, 16));
    ScalarField f(g);
    for (int i = 0; i < 128; ++i) f.v[i] = std::cos(g.coord(0, i));
    const ScalarField u = solve_sts_field(0.37, f, b);
    for (int i = 0; i < 128; ++i) CHECK(u.v[i] == doctest::Approx(f.v[i]).epsilon(1e-9));

    ScalarField bad = f;
    for (auto& v : bad.v) v += 1.0;  // nonzero mean: outside H^{-s}_diamond
    CHECK_THROWS(solve_sts_field(0.37, bad, b));
}

TEST_CASE("solve_sts norm identity ||u||_{H^s} = ||f||_{H^{-s}}") {
    const auto b = interval_basis();
    std::mt19937_64 rng(9);
    for (double s : {0.25, 0.5, 0.75}) {
        SpectralCoeffs f;
        f.basis = b;
        f.c = uniform_pm1_vector(rng, b->size());
        const double lhs = sobolev_norm(s, solve_sts(s, f));
        const double rhs = sobolev_norm(-s, f);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("sobolev_norm basics and the interpolation inequality") {
    const auto b = interval_basis();
    SpectralCoeffs ek;
    ek.basis = b;
    ek.c.assign(b->size(), 0.0);
    ek.c[3] = 1.0;
    for (double r : {-1.0, 0.0, 0.5, 2.0})
        CHECK(sobolev_norm(r, ek) == doctest::Approx(std::pow(b->values[3], r / 2)).epsilon(1e-12));

    std::mt19937_64 rng(13);
    SpectralCoeffs f;
    f.basis = b;
    f.c = uniform_pm1_vector(rng, b->size());
    double l2 = 0.0;
    for (double v : f.c) l2 += v * v;
    CHECK(sobolev_norm(0.0, f) == doctest::Approx(std::sqrt(l2)).epsilon(1e-12));

    // Hoelder on the spectral sum: ||u||_r <= ||u||_{r0}^{1-t} ||u||_{r1}^t
    for (int trial = 0; trial < 50; ++trial) {
        SpectralCoeffs u;
        u.basis = b;
        u.c = uniform_pm1_vector(rng, b->size());
        const double r0 = -1.0 + 2.0 * uniform01(rng);
        const double r1 = r0 + 0.2 + 1.5 * uniform01(rng);
        const double t = uniform01(rng);
        const double r = (1.0 - t) * r0 + t * r1;
        const double lhs = sobolev_norm(r, u);
        const double rhs =
            std::pow(sobolev_norm(r0, u), 1.0 - t) * std::pow(sobolev_norm(r1, u), t);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("circle sobolev norms use the (1 + lambda)^r weights") {
    const Geometry g = Geometry::circle(2 * M_PI, 64);
    const auto b = std::make_shared<EigenBasis>(analytic_basis(g, 8));
    SpectralCoeffs e0;
    e0.basis = b;
    e0.c.assign(8, 0.0);
    e0.c[0] = 1.0;  // lambda = 1
    CHECK(sobolev_norm(1.0, e0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("source dict: supported in O, exactly orthonormal, mean-zero on the circle") {
    const auto b = interval_basis();
    const Region o = Region::from_coords(b->geom, RegionLabel::O, 1.8, 2.6);
    const SourceDict d = make_source_dict(b, o, 6);
    for (int j = 0; j < 6; ++j) {
        for (int i = 0; i < b->geom.node_count(); ++i)
            if (!o.contains_flat(i)) CHECK(d.elements[j].v[i] == 0.0);
        for (int k = j; k < 6; ++k) {
            const double ip = inner_product_l2(d.elements[j], d.elements[k]);
            CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) <= 1e-12);
        }
    }

    const Geometry gc = Geometry::circle(2 * M_PI, 256);
    const auto bc = std::make_shared<EigenBasis>(analytic_basis(gc, 32));
    const Region oc = Region::from_coords(gc, RegionLabel::O, 1.0, 3.0);
    const SourceDict dc = make_source_dict(bc, oc, 5);
    for (int j = 0; j < 5; ++j) CHECK(std::abs(mean_value(dc.elements[j])) <= 1e-14);
}

TEST_CASE("sts matrix: identical metrics give identical matrices") {
    const auto b = interval_basis();
    const Region o = Region::from_coords(b->geom, RegionLabel::O, 1.8, 2.6);
    const SourceDict d = make_source_dict(b, o, 6);
    const OperatorMatrix m1 = build_sts_matrix(0.5, d, o, -0.5, 0.5);
    const OperatorMatrix m2 = build_sts_matrix(0.5, d, o, -0.5, 0.5);
    CHECK(operator_norm_diff(m1, m2) == 0.0);
    CHECK(!m1.region_mismatch);
}

TEST_CASE("sts matrix is symmetric when the dict doubles as trace functions") {
    // self-adjointness of L^{-s}: (L^{-s} f_j, f_i) = (f_j, L^{-s} f_i);
    // verified against directly computed inner products on a 5x5 block
    const auto b = interval_basis(384, 48);
    const Region o = Region::from_coords(b->geom, RegionLabel::O, 1.8, 2.6);
    const SourceDict d = make_source_dict(b, o, 5);
    const OperatorMatrix m = build_sts_matrix(0.5, d, o, -0.5, 0.5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            CHECK(m.m(i, j) == doctest::Approx(m.m(j, i)).epsilon(1e-8));
            const ScalarField u = synthesize(solve_sts(0.5, d.coeffs[j]));
            const double direct = inner_product_l2(u, d.elements[i]);
            CHECK(m.m(i, j) == doctest::Approx(direct).epsilon(1e-10));
        }
}

TEST_CASE("sts matrix flags a dict/target region mismatch") {
    const auto b = interval_basis();
    const Region o = Region::from_coords(b->geom, RegionLabel::O, 1.8, 2.6);
    const Region other = Region::from_coords(b->geom, RegionLabel::A, 0.4, 1.2);
    const SourceDict d = make_source_dict(b, o, 4);
    CHECK(build_sts_matrix(0.5, d, other, -0.5, 0.5).region_mismatch);
}

TEST_CASE("svd with unit weights reduces to the plain singular values") {
    OperatorMatrix om;
    om.m = DenseMatrix(3, 3);
    om.m(0, 0) = 3.0;
    om.m(1, 1) = 1.0;
    om.m(2, 2) = 2.0;
    om.src_weight = {1.0, 1.0, 1.0};
    om.tgt_weight = {1.0, 1.0, 1.0};
    const SingularSystem sys = svd(om);
    CHECK(sys.sigma[0] == doctest::Approx(3.0));
    CHECK(sys.sigma[1] == doctest::Approx(2.0));
    CHECK(sys.sigma[2] == doctest::Approx(1.0));

    OperatorMatrix id = om;
    id.m = DenseMatrix::identity(3);
    for (double s : svd(id).sigma) CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("svd singular vectors are orthonormal in the weighted coordinates") {
    const auto b = interval_basis();
    const Region o = Region::from_coords(b->geom, RegionLabel::O, 1.8, 2.6);
    const SourceDict d = make_source_dict(b, o, 6);
    const OperatorMatrix m = build_sts_matrix(0.5, d, o, -0.5, 0.5);
    const SingularSystem sys = svd(m);
    for (std::size_t a = 0; a < 6; ++a)
        for (std::size_t c = a; c < 6; ++c) {
            double ipu = 0.0, ipv = 0.0;
            for (std::size_t i = 0; i < 6; ++i) {
                ipu += sys.u(i, a) * sys.u(i, c);
                ipv += sys.v(i, a) * sys.v(i, c);
            }
            CHECK(std::abs(ipu - (a == c ? 1.0 : 0.0)) <= 1e-8);
            CHECK(std::abs(ipv - (a == c ? 1.0 : 0.0)) <= 1e-8);
        }
    // residual || B v - sigma u || <= 1e-8 sigma_1 in weighted coordinates
    DenseMatrix bw(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            bw(i, j) = std::sqrt(m.tgt_weight[i]) * m.m(i, j) / std::sqrt(m.src_weight[j]);
    for (int k = 0; k < 6; ++k)
        for (int i = 0; i < 6; ++i) {
            double bv = 0.0;
            for (int j = 0; j < 6; ++j) bv += bw(i, j) * sys.v(j, k);
            CHECK(std::abs(bv - sys.sigma[k] * sys.u(i, k)) <= 1e-8 * sys.sigma[0]);
        }
}

TEST_CASE("operator_norm_diff: rank-one perturbation and homogeneity") {
    const auto b = interval_basis();
    const Region o = Region::from_coords(b->geom, RegionLabel::O, 1.8, 2.6);
    const SourceDict d = make_source_dict(b, o, 5);
    const OperatorMatrix m1 = build_sts_matrix(0.5, d, o, -0.5, 0.5);

    // rank-one bump of unit weighted norm scaled by sigma
    const double sigma = 0.037;
    OperatorMatrix m2 = m1;
    m2.m(2, 3) += sigma * std::sqrt(m1.src_weight[3]) / std::sqrt(m1.tgt_weight[2]);
    CHECK(operator_norm_diff(m1, m2) == doctest::Approx(sigma).epsilon(1e-10));

    OperatorMatrix a1 = m1, a2 = m2;
    for (std::size_t i = 0; i < a1.m.rows(); ++i)
        for (std::size_t j = 0; j < a1.m.cols(); ++j) {
            a1.m(i, j) *= -2.5;
            a2.m(i, j) *= -2.5;
        }
    CHECK(operator_norm_diff(a1, a2) ==
          doctest::Approx(2.5 * operator_norm_diff(m1, m2)).epsilon(1e-10));
}

TEST_CASE("operator_norm_diff rejects mismatched weights") {
    const auto b = interval_basis();
    const Region o = Region::from_coords(b->geom, RegionLabel::O, 1.8, 2.6);
    const SourceDict d = make_source_dict(b, o, 4);
    const OperatorMatrix m1 = build_sts_matrix(0.5, d, o, -0.5, 0.5);
    const OperatorMatrix m2 = build_sts_matrix(0.5, d, o, -1.0, 1.0);
    CHECK_THROWS(operator_norm_diff(m1, m2));
}

TEST_CASE("serial and parallel sts assembly agree bitwise") {
    const auto b = interval_basis(384, 48);
    const Region o = Region::from_coords(b->geom, RegionLabel::O, 1.8, 2.6);
    const SourceDict d = make_source_dict(b, o, 8);
    const OperatorMatrix mp = build_sts_matrix(0.4, d, o, -0.4, 0.4);
    const OperatorMatrix ms = build_sts_matrix_serial(0.4, d, o, -0.4, 0.4);
    CHECK((mp.m - ms.m).max_abs() == 0.0);
}
