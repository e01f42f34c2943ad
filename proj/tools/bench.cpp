// serial vs OpenMP timings for the data-parallel kernels
#include <chrono>
#include <cstdio>
#include <memory>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fraclab/extension.hpp"
#include "fraclab/instability.hpp"
#include "fraclab/inverse.hpp"

using namespace fraclab;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double time_it(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds_since(t0);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; parallel paths run serially\n");
#endif

    const Geometry g = Geometry::interval(1.0, 1600);
    const auto basis = std::make_shared<EigenBasis>(analytic_basis(g, 400));
    const Region o = Region::from_coords(g, RegionLabel::O, 0.55, 0.85);
    const SourceDict dict = make_source_dict(basis, o, 24);

    std::printf("%-28s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]", "speedup");

    {
        OperatorMatrix ms, mp;
        const double ts = time_it([&] { ms = build_sts_matrix_serial(0.5, dict, o, -0.5, 0.5); });
        const double tp = time_it([&] { mp = build_sts_matrix(0.5, dict, o, -0.5, 0.5); });
        double dev = (ms.m - mp.m).max_abs();
        std::printf("%-28s %10.4f %10.4f %7.2fx   (max dev %.1e)\n", "sts matrix assembly", ts,
                    tp, ts / tp, dev);
    }
    {
        SpectralCoeffs f;
        f.basis = basis;
        f.c.assign(basis->values.size(), 1.0);
        std::vector<double> heights;
        for (int i = 1; i <= 160; ++i) heights.push_back(0.02 * i);
        DenseMatrix a, b;
        const double ts = time_it([&] { a = eval_slices_serial(0.5, f, heights); });
        const double tp = time_it([&] { b = eval_slices(0.5, f, heights); });
        std::printf("%-28s %10.4f %10.4f %7.2fx   (max dev %.1e)\n", "extension slices", ts, tp,
                    ts / tp, (a - b).max_abs());
    }
    {
        CompressionSpec spec;
        spec.geom = Geometry::interval(1.0, 1408);
        spec.O = Region::from_coords(spec.geom, RegionLabel::O, 0.28, 0.84);
        spec.O_plus = Region::from_coords(spec.geom, RegionLabel::O_plus, 0.27, 0.85);
        spec.dict_count = 44;
        spec.modes = 352;
        spec.nt = 64;
        std::vector<double> s1, s2;
        const double ts = time_it([&] { s1 = compression_singulars_serial(spec); });
        const double tp = time_it([&] { s2 = compression_singulars(spec); });
        double dev = 0.0;
        for (std::size_t i = 0; i < s1.size(); ++i) dev = std::max(dev, std::abs(s1[i] - s2[i]));
        std::printf("%-28s %10.4f %10.4f %7.2fx   (max dev %.1e)\n", "compression assembly+svd",
                    ts, tp, ts / tp, dev);
    }
    return 0;
}
