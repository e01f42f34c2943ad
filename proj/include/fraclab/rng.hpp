#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fraclab {

/// uniform [0,1) from explicit bit mapping; identical output on every
/// platform for a fixed seed (distribution classes are not portable)
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_pm1(std::mt19937_64& rng) { return 2.0 * uniform01(rng) - 1.0; }

inline std::vector<double> uniform_pm1_vector(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform_pm1(rng);
    return v;
}

}  // namespace fraclab
