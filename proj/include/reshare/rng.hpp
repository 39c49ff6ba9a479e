#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace reshare {

// Counter-based seed derivation: every consumer (environment, each agent,
// each episode) gets an independent stream keyed by (master, path...), so
// replays are byte-identical regardless of scheduling or thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p));
    return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
}

// Uniform double in [0,1). Hand-rolled because std::uniform_real_distribution
// is implementation-defined; this keeps traces reproducible across toolchains.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index into `probs` (need not be normalized more tightly than 1e-9).
inline int sample_discrete(std::span<const double> probs, Rng& rng) {
    if (probs.empty()) throw std::invalid_argument("sample_discrete: empty support");
    double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
}

}  // namespace reshare
