#pragma once

#include <cstdint>
#include <random>

namespace ndl {

/// Uniform draw in [0, n); portable across standard libraries.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
    return n <= 1 ? 0 : rng() % n;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace ndl
