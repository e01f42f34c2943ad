#pragma once

#include <cstdint>
#include <string>

#include "fraclab/geometry.hpp"

namespace fraclab {

/// Fully resolved experiment configuration. Parsed from a sectioned
/// key=value file; unknown sections or keys are errors, every effective
/// value is echoed into the run manifest.
struct ExperimentConfig {
    // [geometry]
    std::string kind = "interval";
    double length = 1.0, length_y = 1.0;
    int n = 400, n_y = 0;

    // [regions] coordinate ranges
    double o0 = 0.55, o1 = 0.85;
    double oprime0 = 0.60, oprime1 = 0.80;
    double oplus0 = 0.50, oplus1 = 0.90;
    double a0 = 0.15, a1 = 0.35;
    double aplus0 = 0.08, aplus1 = 0.42;

    // [fractional]
    double s = 0.5;
    int modes = 96;      // ambient modes K
    int dict_count = 12; // source dictionary size J

    // [family]
    int tau_count = 10;  // schedule 2^{-1} .. 2^{-tau_count}

    // [compression]
    double comp_r = 8.0;
    int comp_dict = 66, comp_modes = 528, comp_n = 2112, comp_nt = 72, comp_stride = 3;
    double comp_o0 = 0.28, comp_o1 = 0.84, comp_oplus0 = 0.27, comp_oplus1 = 0.85;

    // [runge] (square boxes on a unit square; the Runge operator needs n >= 2
    // for nontrivial rank: 1D solutions are affine away from the source)
    int runge_n = 40;
    double runge_o0 = 0.60, runge_o1 = 0.85;
    double runge_a0 = 0.20, runge_a1 = 0.45;
    double runge_aplus0 = 0.12, runge_aplus1 = 0.53;

    // [weyl]
    int weyl_count = 400;
    double weyl_r = 3.141592653589793;
    double weyl_base_length = 3.141592653589793;
    int weyl_base_n = 256;

    // [eigs]
    bool dump_vectors = false;

    // [run]
    std::uint64_t seed = 1;
    std::string out = "out";
    int threads = 0;  // 0 = library default

    Geometry geometry() const;
    Region region_o() const;
    Region region_o_prime() const;
    Region region_o_plus() const;
    Region region_a() const;
    Region region_a_plus() const;

    std::vector<double> tau_schedule() const;

    /// module preconditions, checked before any solve; named-constraint errors
    void validate() const;
};

ExperimentConfig parse_config(const std::string& path);

/// FRACLAB_OUT, FRACLAB_SEED, FRACLAB_THREADS (mirrors of the CLI flags)
void apply_env_overrides(ExperimentConfig& cfg);

}  // namespace fraclab
