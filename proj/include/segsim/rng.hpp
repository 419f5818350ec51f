#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace segsim {

// All stochastic operations draw from a shared 64-bit Mersenne Twister.
// Distribution mapping is done by hand below rather than through
// std::uniform_int_distribution, whose output is implementation-defined;
// this keeps trajectories identical across standard libraries.
using RngEngine = std::mt19937_64;

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Unbiased draw from {0, ..., n-1} by masked rejection.
inline std::uint64_t uniform_below(RngEngine& rng, std::uint64_t n) {
    if (n <= 1) {
        return 0;
    }
    const std::uint64_t mask = ~0ULL >> std::countl_zero(n - 1);
    for (;;) {
        const std::uint64_t v = rng() & mask;
        if (v < n) {
            return v;
        }
    }
}

}  // namespace segsim
