#pragma once

#include <cstdint>
#include <numbers>
#include <cmath>
#include <utility>

namespace talenti {

// SplitMix64. Small, splittable, and identical everywhere; substreams are
// derived by XORing the seed with a stream index.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t s) : state(s) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() { // in (0, 1]
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Box-Muller pair; std::normal_distribution is implementation-defined,
    // this is not.
    std::pair<double, double> normal_pair() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }
};

} // namespace talenti
