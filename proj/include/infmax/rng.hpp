#pragma once

#include <cstdint>
#include <random>

namespace infmax {

// All stochastic code in this project draws from std::mt19937_64 with an
// explicit 64-bit seed. Derived streams (per chunk, per sample, per row)
// come from mix_seed so that parallel work stays reproducible.
using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates seed+index streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

}  // namespace infmax
