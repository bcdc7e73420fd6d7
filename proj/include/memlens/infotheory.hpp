#pragma once

#include "memlens/entropy.hpp"
#include "memlens/permutation_result.hpp"
#include "memlens/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace memlens {

/// Dense ids for the distinct values of a projection, with samples grouped
/// by id (CSR layout). Ids follow first occurrence, so relabeling symbols
/// does not change the grouping order.
struct ContextPartition {
    std::vector<std::uint32_t> context_of;
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> offsets;
    /// True for the empty projection (every sample in one context).
    bool trivial = false;

    std::size_t n_contexts() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t n_samples() const noexcept { return context_of.size(); }
};

ContextPartition partition_contexts(std::span<const LagSample> samples, const Projection& p);

/// Estimated H(A | C) = H(A, C) - H(C), with H(C) := 0 for the trivial partition.
double conditional_entropy(const ContextPartition& contexts, std::span<const std::uint32_t> actions,
                           std::uint32_t n_actions, Estimator estimator);

/// The memory statistic for one lag i, evaluated for arbitrary action columns:
///   M_0 = H(A) - H(A | X_t)
///   M_i = H(A | X_t, Z_{t-i+1:t-1}) - H(A | X_t, Z_{t-i:t-1})
/// which expands to the usual entropy-difference formulas. The action-free
/// entropy terms are computed once.
class MemoryStatistic {
public:
    MemoryStatistic(std::span<const LagSample> samples, Estimator estimator);

    double evaluate(std::span<const std::uint32_t> actions) const;
    double observed() const { return evaluate(actions_); }

    std::size_t lag() const noexcept { return lag_; }
    std::size_t n_samples() const noexcept { return actions_.size(); }
    std::size_t n_distinct_contexts() const noexcept { return full_.n_contexts(); }
    std::uint32_t n_actions() const noexcept { return n_actions_; }
    Estimator estimator() const noexcept { return estimator_; }
    const std::vector<std::uint32_t>& actions() const noexcept { return actions_; }

private:
    double joint_entropy(const ContextPartition& contexts, std::span<const std::uint32_t> actions) const;

    Estimator estimator_;
    std::size_t lag_;
    std::uint32_t n_actions_ = 0;
    std::vector<std::uint32_t> actions_;
    ContextPartition short_;
    ContextPartition full_;
    double short_context_entropy_ = 0.0;
    double full_context_entropy_ = 0.0;
};

/// I(A_t; X_t) = H(A) + H(X) - H(A, X). History, if any, is ignored.
double mutual_information(std::span<const LagSample> samples, Estimator estimator);

/// I(A_t; Z_{t-i} | X_t, Z_{t-i+1:t-1}) for samples at a common lag i >= 1.
/// Reported raw; the Grassberger estimate can be slightly negative.
double conditional_mi(std::span<const LagSample> samples, Estimator estimator);

struct LagEstimate {
    std::size_t lag = 0;
    double nats = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_distinct_contexts = 0;
    std::optional<PermutationResult> test;
};

struct MemoryProfile {
    Estimator estimator = Estimator::grassberger;
    std::size_t min_t = 1;
    std::vector<LagEstimate> lags;
};

struct ProfileOptions {
    std::size_t max_lag = 3;
    Estimator estimator = Estimator::grassberger;
    /// Defaults to max_lag + 1 so every lag uses the same time points.
    std::optional<std::size_t> min_t;
    EventPredicate event;

    std::size_t effective_min_t() const { return min_t.value_or(max_lag + 1); }
};

/// M_0..M_max_lag, each pooled over the identical set of (episode, t) points.
/// Throws NoSamplesError when nothing survives windowing and filtering.
MemoryProfile memory_profile(const TrajectoryDataset& ds, const ProfileOptions& options);

}  // namespace memlens
