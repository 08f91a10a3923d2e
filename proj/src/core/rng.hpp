#pragma once

#include <cmath>
#include <cstdint>

namespace hop {

// Portable splitmix64 generator. All stochastic parts of the toolkit
// (simulator noise, particle sampling, RANSAC) draw from this so that a
// seed fully determines every output, independent of platform and of the
// C++ standard library in use. Streams for independent work items are
// derived with derive() so parallel execution cannot change results.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Uniform integer in [0, bound). bound must be > 0.
    uint64_t uniform_u64(uint64_t bound) {
        // modulo bias is < 2^-40 for the bounds used here (< 2^24)
        return next_u64() % bound;
    }

    /// Standard normal via Box-Muller (no cached spare, fixed draw order).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double normal(double sigma) { return sigma == 0.0 ? 0.0 : normal() * sigma; }
};

/// Derive an independent stream from (seed, a, b). Used per frame index /
/// per pass so work partitioning never changes the numbers drawn.
inline Rng derive_rng(uint64_t seed, uint64_t a, uint64_t b = 0) {
    Rng mixer(seed ^ (a * 0xD1B54A32D192ED03ULL) ^ (b * 0x8CB92BA72F3D8DD7ULL));
    uint64_t s = mixer.next_u64();
    return Rng(s);
}

}  // namespace hop
