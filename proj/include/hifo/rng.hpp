#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace hifo {

// Sampling helpers built directly on mt19937_64 output. The standard
// distribution classes are implementation-defined, which would make run
// replays depend on the stdlib in use, so draws are derived by hand here.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return static_cast<std::size_t>(x % n);
}

// Draws an index with probability proportional to weights[i]. Weights need
// not be normalized but must be non-negative with a positive total.
inline std::size_t weighted_index(std::mt19937_64& rng, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("weighted_index: negative weight");
        total += w;
    }
    if (weights.empty() || total <= 0.0)
        throw std::invalid_argument("weighted_index: weights must have positive total");
    const double u = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Independent deterministic stream derived from a master seed.
inline std::mt19937_64 seeded_rng(std::uint64_t master, std::uint64_t stream = 0) {
    return std::mt19937_64(splitmix64(master + splitmix64(stream)));
}

}  // namespace hifo
