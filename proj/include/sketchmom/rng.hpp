#pragma once

#include <cstdint>
#include <random>

namespace sketchmom {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// RNG for the (seed, stream) pair. Distinct streams with the same seed are
/// decorrelated by mixing both values through splitmix64 before seeding.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL;
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

} // namespace sketchmom
