#pragma once

#include <cstdint>
#include <vector>

namespace windgrid {

// Deterministic, platform-independent PRNG. std::shuffle and the standard
// distributions are implementation-defined, so selections drawn through them
// would differ across standard libraries; everything random in the toolkit
// goes through this engine instead.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), n > 0. Rejection sampling keeps it unbiased.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Standard normal via Box-Muller on the raw uniform stream.
    double next_normal();

    // Derives an independent sub-stream for (seed, index) pairs; used to make
    // per-selection randomness order-independent.
    static SplitMix64 substream(std::uint64_t master_seed, std::uint64_t index);

private:
    std::uint64_t state_;
};

}  // namespace windgrid
