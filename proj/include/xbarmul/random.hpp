#ifndef XBARMUL_RANDOM_HPP
#define XBARMUL_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace xbarmul {

/// Every stochastic component draws from this engine. mt19937_64 and
/// seed_seq are fully specified by the standard, so streams are portable.
using Rng = std::mt19937_64;

/// Independent stream for (master seed, index). Results never depend on the
/// order in which streams are consumed.
inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t salt = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32)};
    return Rng(seq);
}

/// Uniform in [0, 1) built from the top 53 bits; avoids the
/// implementation-defined std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

/// Uniform in [-magnitude, magnitude].
inline double uniform_symmetric(Rng& rng, double magnitude) {
    return magnitude * (2.0 * uniform01(rng) - 1.0);
}

/// Standard normal via Box-Muller, again to stay portable across libraries.
inline double standard_normal(Rng& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace xbarmul

#endif  // XBARMUL_RANDOM_HPP
