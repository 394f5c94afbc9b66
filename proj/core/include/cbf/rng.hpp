#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace cbf {

// Counter-based generator: every draw is a pure function of (seed, counter),
// so sample values do not depend on evaluation order or thread scheduling.
namespace rng {

inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform draw in (0, 1] for stream `seed` at position `counter`.
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t bits = mix(mix(seed) ^ mix(counter + 1));
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal draw, Box-Muller on two counter-indexed uniforms.
inline double gaussian(std::uint64_t seed, std::uint64_t counter) {
    const double u1 = uniform(seed, 2 * counter);
    const double u2 = uniform(seed, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Derives an independent stream from a parent seed and a stream tag.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    return mix(mix(seed) ^ mix(~tag));
}

} // namespace rng
} // namespace cbf
