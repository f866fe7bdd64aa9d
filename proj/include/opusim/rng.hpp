// rng.hpp — Counter-based keyed random streams.
//
// Every random draw in the simulator is a pure function of
// (seed, domain tag, channel-or-unit id, pass id, symbol index), so serial
// and parallel execution produce bit-identical results and any draw can be
// replayed in isolation.  The generator is a splitmix64-style absorb/finalize
// over the key words.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace opusim::rng {

// Key domains.  Keeping these disjoint keeps unrelated draws uncorrelated
// even when the remaining key words coincide.
inline constexpr std::uint64_t kAmpJitter = 1;
inline constexpr std::uint64_t kPhaseJitter = 2;
inline constexpr std::uint64_t kPhaseDrift = 3;
inline constexpr std::uint64_t kReadout = 4;
inline constexpr std::uint64_t kGeneric = 5;

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t tag,
                               std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = seed;
    h = mix64(h + kGolden + tag);
    h = mix64(h + kGolden + a);
    h = mix64(h + kGolden + b);
    h = mix64(h + kGolden + c);
    return mix64(h + kGolden);
}

// Uniform in [0, 1), 53-bit resolution.
inline double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double keyed_uniform(std::uint64_t seed, std::uint64_t tag,
                            std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return to_unit(keyed_u64(seed, tag, a, b, c));
}

// Standard normal via Box-Muller on two successive hashes.  u1 is shifted
// into (0, 1] so the log never sees zero.
inline double keyed_normal(std::uint64_t seed, std::uint64_t tag,
                           std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    const std::uint64_t h1 = keyed_u64(seed, tag, a, b, c);
    const std::uint64_t h2 = mix64(h1 + kGolden);
    const double u1 = static_cast<double>((h1 >> 11) + 1) * 0x1.0p-53;
    const double u2 = to_unit(h2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace opusim::rng
