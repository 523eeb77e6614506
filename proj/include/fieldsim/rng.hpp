#pragma once

#include <cstdint>
#include <random>

namespace fieldsim {

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Stream seed for item `index` under `root`: splitmix64(splitmix64(root) ^ index).
// Independent of execution order, so parallel and sequential runs draw identical streams.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index)
{
    return splitmix64(splitmix64(root) ^ index);
}

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits; avoids implementation-defined
// std::uniform_real_distribution so streams are identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace fieldsim
