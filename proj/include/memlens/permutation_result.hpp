#pragma once

#include <cstdint>
#include <vector>

namespace memlens {

struct PermutationResult {
    double observed = 0.0;
    /// Ascending; one value per resampled replicate.
    std::vector<double> replicates;
    /// Replicate at 1-based rank ceil(level * reps).
    double threshold = 0.0;
    double level = 0.95;
    bool significant = false;
    /// Every replicate equals the observed value; the null carries no spread.
    bool degenerate = false;
    std::uint64_t seed = 0;
};

}  // namespace memlens
