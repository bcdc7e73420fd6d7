#include "memlens/significance.hpp"

#include "memlens/error.hpp"
#include "memlens/parallel.hpp"
#include "memlens/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace memlens {

std::size_t threshold_rank(std::size_t reps, double level) {
    // The small offset keeps products like 0.95 * 100 from rounding up a rank.
    const auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(reps) - 1e-9));
    return std::clamp<std::size_t>(rank, 1, reps);
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t j) {
    return derive_seed(seed, 0x5eed0000ull + j);
}

std::vector<std::uint32_t> resample_action_column(std::span<const std::uint32_t> actions,
                                                  std::uint64_t seed) {
    if (actions.empty()) throw NoSamplesError("resample: no samples");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    std::vector<std::uint32_t> out(actions.size());
    for (auto& a : out) a = actions[pick(rng)];
    return out;
}

std::vector<LagSample> resample_actions(std::span<const LagSample> samples, std::uint64_t seed) {
    if (samples.empty()) throw NoSamplesError("resample: no samples");
    std::vector<std::uint32_t> actions;
    actions.reserve(samples.size());
    for (const auto& s : samples) actions.push_back(s.a_now.id);
    const auto drawn = resample_action_column(actions, seed);
    std::vector<LagSample> out(samples.begin(), samples.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i].a_now = Symbol{drawn[i]};
    return out;
}

PermutationResult permutation_test(const MemoryStatistic& statistic,
                                   const PermutationOptions& options) {
    if (options.reps < 20) throw std::invalid_argument("permutation test needs at least 20 replicates");
    if (!(options.level > 0.0 && options.level < 1.0))
        throw std::invalid_argument("significance level must lie in (0, 1)");
    if (statistic.n_samples() == 0) throw NoSamplesError("permutation test: no samples");

    PermutationResult result;
    result.observed = statistic.observed();
    result.level = options.level;
    result.seed = options.seed;
    result.replicates.assign(options.reps, 0.0);
    parallel_for(options.reps, worker_count(options.threads), [&](std::size_t j) {
        const auto column = resample_action_column(statistic.actions(), replicate_seed(options.seed, j));
        result.replicates[j] = statistic.evaluate(column);
    });
    std::sort(result.replicates.begin(), result.replicates.end());
    result.threshold = result.replicates[threshold_rank(options.reps, options.level) - 1];
    result.significant = result.observed >= result.threshold;
    result.degenerate = std::all_of(result.replicates.begin(), result.replicates.end(),
                                    [&](double v) { return v == result.observed; });
    return result;
}

PermutationResult permutation_test(std::span<const LagSample> samples, Estimator estimator,
                                   const PermutationOptions& options) {
    if (samples.empty()) throw NoSamplesError("permutation test: no samples");
    return permutation_test(MemoryStatistic(samples, estimator), options);
}

MemoryProfile analyze_memory(const TrajectoryDataset& ds, const ProfileOptions& profile_options,
                             const PermutationOptions& options) {
    MemoryProfile profile;
    profile.estimator = profile_options.estimator;
    profile.min_t = profile_options.effective_min_t();
    for (std::size_t lag = 0; lag <= profile_options.max_lag; ++lag) {
        const auto samples = extract_samples(ds, lag, profile.min_t, profile_options.event);
        if (samples.empty())
            throw NoSamplesError("no eligible samples at min_t " + std::to_string(profile.min_t) +
                                 (profile_options.event ? " after filtering" : ""));
        MemoryStatistic stat(samples, profile_options.estimator);
        auto lag_options = options;
        lag_options.seed = derive_seed(options.seed, lag);
        LagEstimate est{lag, stat.observed(), stat.n_samples(), stat.n_distinct_contexts(), {}};
        est.test = permutation_test(stat, lag_options);
        profile.lags.push_back(std::move(est));
    }
    return profile;
}

}  // namespace memlens
