#pragma once

#include "memlens/infotheory.hpp"
#include "memlens/permutation_result.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace memlens {

struct PermutationOptions {
    std::size_t reps = 100;
    double level = 0.95;
    std::uint64_t seed = 0;
    /// 0 = automatic (capped by MEMLENS_THREADS). Results do not depend on it.
    std::size_t threads = 0;
};

/// 1-based rank of the threshold replicate, ceil(level * reps).
std::size_t threshold_rank(std::size_t reps, double level);

/// Seed of replicate j under base seed `seed`.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t j);

/// Draws a new action column i.i.d. with replacement from the empirical
/// marginal of `actions`.
std::vector<std::uint32_t> resample_action_column(std::span<const std::uint32_t> actions,
                                                  std::uint64_t seed);

/// Same histories and observations; each a_now redrawn from the marginal.
std::vector<LagSample> resample_actions(std::span<const LagSample> samples, std::uint64_t seed);

/// Compares the observed statistic against `reps` marginal-resampling
/// replicates; significant iff observed >= the threshold replicate.
PermutationResult permutation_test(const MemoryStatistic& statistic, const PermutationOptions& options);
PermutationResult permutation_test(std::span<const LagSample> samples, Estimator estimator,
                                   const PermutationOptions& options);

/// memory_profile plus a permutation test per lag. Lag i is tested under
/// derive_seed(options.seed, i).
MemoryProfile analyze_memory(const TrajectoryDataset& ds, const ProfileOptions& profile_options,
                             const PermutationOptions& options);

}  // namespace memlens
