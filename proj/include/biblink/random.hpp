#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace biblink {

/// Deterministic bounded random values on top of std::mt19937_64. The engine
/// sequence is pinned by the standard; std::uniform_int_distribution is not,
/// so rejection sampling is done by hand to keep outputs identical across
/// platforms and standard libraries.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform value in [0, n), n >= 1.
    std::uint64_t bounded(std::uint64_t n) {
        std::uint64_t reject_below = (0 - n) % n;
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= reject_below) return r % n;
        }
    }

private:
    std::mt19937_64 engine_;
};

/// A uniform sample of n distinct indices from [0, population), returned in
/// ascending order so sampled rows keep their canonical order. n at or above
/// the population size selects everything.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                               std::uint64_t seed) {
    std::vector<std::size_t> indices(population);
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    if (n >= population) return indices;

    SampleRng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.bounded(population - i));
        std::swap(indices[i], indices[j]);
    }
    indices.resize(n);
    std::sort(indices.begin(), indices.end());
    return indices;
}

}  // namespace biblink
