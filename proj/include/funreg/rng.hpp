#ifndef FUNREG_RNG_HPP
#define FUNREG_RNG_HPP

#include <cmath>
#include <cstdint>

namespace funreg {

// Counter-based pseudo-random numbers (splitmix64 finalizer). Every draw is
// a pure function of (seed, stream, counter), so parallel and serial
// evaluation orders produce bit-identical streams.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2) + splitmix64(b)));
}

/// Deterministic substream: rng_stream(seed, s1, s2, ...) derives a state
/// from the seed and any number of stream tags.
template <typename... Tags>
std::uint64_t rng_stream(std::uint64_t seed, Tags... tags) {
    std::uint64_t s = splitmix64(seed);
    ((s = hash_combine(s, static_cast<std::uint64_t>(tags))), ...);
    return s;
}

/// Uniform double in [0, 1) with 53 random mantissa bits.
inline double u01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform on [-1, 1).
inline double uniform_pm1(std::uint64_t stream, std::uint64_t counter) {
    return 2.0 * u01(splitmix64(stream ^ splitmix64(counter))) - 1.0;
}

/// Uniform on [0, 1).
inline double uniform01(std::uint64_t stream, std::uint64_t counter) {
    return u01(splitmix64(stream ^ splitmix64(counter)));
}

/// Standard normal via Box-Muller on two counter-based uniforms.
inline double normal01(std::uint64_t stream, std::uint64_t counter) {
    const double u1 = u01(splitmix64(stream ^ splitmix64(2 * counter)));
    const double u2 = u01(splitmix64(stream ^ splitmix64(2 * counter + 1)));
    // Guard against log(0).
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

/// Mammen's two-point multiplier: mean 0, variance 1, third moment 1.
/// P(V = (1-sqrt5)/2) = (5+sqrt5)/10, P(V = (1+sqrt5)/2) = (5-sqrt5)/10.
inline double mammen_multiplier(std::uint64_t stream, std::uint64_t counter) {
    static const double kSqrt5 = std::sqrt(5.0);
    static const double kLow = (1.0 - kSqrt5) / 2.0;
    static const double kHigh = (1.0 + kSqrt5) / 2.0;
    static const double kProbLow = (5.0 + kSqrt5) / 10.0;
    return uniform01(stream, counter) < kProbLow ? kLow : kHigh;
}

/// Rademacher multiplier: +1/-1 with probability 1/2 each.
inline double rademacher_multiplier(std::uint64_t stream, std::uint64_t counter) {
    return uniform01(stream, counter) < 0.5 ? -1.0 : 1.0;
}

} // namespace funreg

#endif
