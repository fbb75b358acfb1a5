#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace olab {

// std::*_distribution output is implementation-defined, so manifests built on
// different standard libraries would diverge. These helpers only rely on the
// raw engine output, which is fully specified for mt19937_64.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stable seed derivation from a master seed and an identifier.
inline std::uint64_t deriveSeed(std::uint64_t master, std::string_view id) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : id) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return splitmix64(master ^ splitmix64(h));
}

inline std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t salt) {
    return splitmix64(master ^ splitmix64(salt + 0x632BE59BD9B4E019ull));
}

/// Uniform integer in [0, bound) by rejection sampling.
inline std::uint64_t uniformBelow(Engine& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniformUnit(Engine& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <typename T>
void shuffleInPlace(std::span<T> items, Engine& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniformBelow(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

template <typename Container>
void shuffleInPlace(Container& items, Engine& rng) {
    shuffleInPlace(std::span(items.data(), items.size()), rng);
}

}  // namespace olab
