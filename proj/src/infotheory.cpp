#include "memlens/infotheory.hpp"

#include "memlens/error.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace memlens {

namespace {

struct KeyHash {
    std::size_t operator()(const CountTable::Key& k) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (auto v : k) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

std::size_t common_lag(std::span<const LagSample> samples) {
    if (samples.empty()) throw NoSamplesError("no samples");
    const auto lag = samples.front().history.size();
    for (const auto& s : samples)
        if (s.history.size() != lag) throw std::invalid_argument("samples mix different lags");
    return lag;
}

double context_entropy(const ContextPartition& contexts, Estimator estimator) {
    if (contexts.trivial) return 0.0;
    EntropyAccumulator acc(estimator, contexts.n_samples());
    for (std::size_t c = 0; c < contexts.n_contexts(); ++c)
        acc.add(contexts.offsets[c + 1] - contexts.offsets[c]);
    return acc.value();
}

/// H(A, C) with counts summed context by context, actions in first-seen order.
double joint_action_entropy(const ContextPartition& contexts,
                            std::span<const std::uint32_t> actions, std::uint32_t n_actions,
                            Estimator estimator) {
    if (actions.size() != contexts.n_samples())
        throw std::invalid_argument("action column length does not match the samples");
    std::vector<std::uint64_t> scratch(n_actions, 0);
    std::vector<std::uint32_t> touched;
    touched.reserve(n_actions);
    EntropyAccumulator acc(estimator, actions.size());
    for (std::size_t c = 0; c < contexts.n_contexts(); ++c) {
        for (auto k = contexts.offsets[c]; k < contexts.offsets[c + 1]; ++k) {
            const auto a = actions[contexts.order[k]];
            if (a >= n_actions) throw std::invalid_argument("action id outside the alphabet");
            if (scratch[a]++ == 0) touched.push_back(a);
        }
        for (auto a : touched) {
            acc.add(scratch[a]);
            scratch[a] = 0;
        }
        touched.clear();
    }
    return acc.value();
}

}  // namespace

ContextPartition partition_contexts(std::span<const LagSample> samples, const Projection& p) {
    ContextPartition out;
    const auto n = samples.size();
    out.context_of.resize(n);
    out.trivial = p.arity() == 0;

    std::vector<std::uint32_t> sizes;
    if (out.trivial) {
        sizes.push_back(static_cast<std::uint32_t>(n));
    } else {
        std::unordered_map<CountTable::Key, std::uint32_t, KeyHash> ids;
        ids.reserve(n);
        CountTable::Key key;
        key.reserve(p.arity());
        for (std::size_t i = 0; i < n; ++i) {
            key.clear();
            project_into(samples[i], p, key);
            auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(sizes.size()));
            if (inserted) sizes.push_back(0);
            out.context_of[i] = it->second;
            ++sizes[it->second];
        }
    }

    out.offsets.assign(sizes.size() + 1, 0);
    for (std::size_t c = 0; c < sizes.size(); ++c) out.offsets[c + 1] = out.offsets[c] + sizes[c];
    out.order.resize(n);
    auto cursor = out.offsets;
    for (std::size_t i = 0; i < n; ++i) out.order[cursor[out.context_of[i]]++] = static_cast<std::uint32_t>(i);
    return out;
}

double conditional_entropy(const ContextPartition& contexts, std::span<const std::uint32_t> actions,
                           std::uint32_t n_actions, Estimator estimator) {
    if (contexts.n_samples() == 0) throw NoSamplesError("no samples");
    return joint_action_entropy(contexts, actions, n_actions, estimator) -
           context_entropy(contexts, estimator);
}

MemoryStatistic::MemoryStatistic(std::span<const LagSample> samples, Estimator estimator)
    : estimator_(estimator), lag_(common_lag(samples)) {
    actions_.reserve(samples.size());
    for (const auto& s : samples) {
        actions_.push_back(s.a_now.id);
        n_actions_ = std::max(n_actions_, s.a_now.id + 1);
    }
    if (lag_ == 0) {
        short_ = partition_contexts(samples, Projection{});
        full_ = partition_contexts(samples, Projection{true, false, 0});
    } else {
        short_ = partition_contexts(samples, Projection{true, false, lag_ - 1});
        full_ = partition_contexts(samples, Projection{true, false, lag_});
    }
    short_context_entropy_ = context_entropy(short_, estimator_);
    full_context_entropy_ = context_entropy(full_, estimator_);
}

double MemoryStatistic::joint_entropy(const ContextPartition& contexts,
                                      std::span<const std::uint32_t> actions) const {
    return joint_action_entropy(contexts, actions, n_actions_, estimator_);
}

double MemoryStatistic::evaluate(std::span<const std::uint32_t> actions) const {
    // Grouped so that constant actions give exactly zero in each bracket.
    const double h_short = joint_entropy(short_, actions) - short_context_entropy_;
    const double h_full = joint_entropy(full_, actions) - full_context_entropy_;
    return h_short - h_full;
}

double mutual_information(std::span<const LagSample> samples, Estimator estimator) {
    if (samples.empty()) throw NoSamplesError("mutual_information: no samples");
    if (samples.front().history.empty()) return MemoryStatistic(samples, estimator).observed();
    std::vector<LagSample> stripped;
    stripped.reserve(samples.size());
    for (const auto& s : samples) stripped.push_back(LagSample{{}, s.x_now, s.a_now});
    return MemoryStatistic(stripped, estimator).observed();
}

double conditional_mi(std::span<const LagSample> samples, Estimator estimator) {
    if (samples.empty()) throw NoSamplesError("conditional_mi: no samples");
    MemoryStatistic stat(samples, estimator);
    if (stat.lag() == 0) throw std::invalid_argument("conditional_mi needs samples with lag >= 1");
    return stat.observed();
}

MemoryProfile memory_profile(const TrajectoryDataset& ds, const ProfileOptions& options) {
    MemoryProfile profile;
    profile.estimator = options.estimator;
    profile.min_t = options.effective_min_t();
    for (std::size_t lag = 0; lag <= options.max_lag; ++lag) {
        const auto samples = extract_samples(ds, lag, profile.min_t, options.event);
        if (samples.empty())
            throw NoSamplesError("no eligible samples at min_t " + std::to_string(profile.min_t) +
                                 (options.event ? " after filtering" : ""));
        MemoryStatistic stat(samples, options.estimator);
        profile.lags.push_back(
            LagEstimate{lag, stat.observed(), stat.n_samples(), stat.n_distinct_contexts(), {}});
    }
    return profile;
}

}  // namespace memlens
