#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pansr {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

/// Derives an independent stream seed from a base seed and a path of stream
/// indices, e.g. derive_seed(master, {cell, trial}).
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = splitmix64(base);
    for (auto v : path) {
        h = splitmix64(h ^ splitmix64(v + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

} // namespace pansr
