#include <cmath>
#include <numbers>

#include "windgrid/rng.hpp"

namespace windgrid {

double SplitMix64::next_normal() {
    // Box-Muller, one variate per call; u1 kept away from 0.
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SplitMix64 SplitMix64::substream(std::uint64_t master_seed, std::uint64_t index) {
    // Decorrelate the stream head: mix the index through one splitmix step
    // before combining with the master seed.
    SplitMix64 mixer(index ^ 0xA5A5A5A55A5A5A5AULL);
    return SplitMix64(master_seed ^ mixer.next_u64());
}

}  // namespace windgrid
