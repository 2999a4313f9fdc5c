#pragma once

// Portable draws on top of std::mt19937_64.  The standard distributions are
// implementation-defined, so seeded reports would differ between standard
// libraries; these helpers only depend on the engine's output sequence.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace aspec::rnd {

using Engine = std::mt19937_64;

/// Engine for chunk `chunk` of a run seeded with `seed`.
inline Engine chunk_engine(std::uint64_t seed, std::uint64_t chunk)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32U)};
    return Engine(seq);
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform(Engine& e) { return static_cast<double>(e() >> 11U) * 0x1.0p-53; }

/// Uniform in [0, n), unbiased.
inline std::uint64_t index(Engine& e, std::uint64_t n)
{
    std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t x = e();
    while (x >= limit)
        x = e();
    return x % n;
}

/// Standard normal deviate (Box-Muller, one of the pair).
inline double normal(Engine& e)
{
    double u1 = 1.0 - uniform(e); // (0, 1]
    double u2 = uniform(e);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace aspec::rnd
