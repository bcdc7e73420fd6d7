#pragma once

#include "memlens/symbol_table.hpp"
#include "memlens/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memlens {

struct WeightedEpisode {
    std::vector<StepRecord> z;
    double p = 0.0;
};

/// Explicit finite distribution over fixed-horizon episodes. Only episodes
/// with positive probability are stored; duplicates are merged.
class JointPolicyModel {
public:
    JointPolicyModel(std::size_t horizon, SymbolTable x_table, SymbolTable a_table,
                     SymbolTable r_table, std::vector<WeightedEpisode> episodes,
                     double normalization_tolerance = 1e-9);

    std::size_t horizon() const noexcept { return horizon_; }
    const SymbolTable& x_table() const noexcept { return x_; }
    const SymbolTable& a_table() const noexcept { return a_; }
    const SymbolTable& r_table() const noexcept { return r_; }
    const std::vector<WeightedEpisode>& episodes() const noexcept { return episodes_; }

    std::size_t n_x() const noexcept { return x_.size(); }
    std::size_t n_a() const noexcept { return a_.size(); }
    std::size_t n_r() const noexcept { return r_.size(); }
    std::size_t n_z() const noexcept { return n_x() * n_a() * n_r(); }

    /// Dense index of a step in Z = X x A x R (x major, r minor).
    std::uint32_t z_index(const StepRecord& z) const noexcept {
        return static_cast<std::uint32_t>((z.x.id * n_a() + z.a.id) * n_r() + z.r.id);
    }

private:
    std::size_t horizon_;
    SymbolTable x_, a_, r_;
    std::vector<WeightedEpisode> episodes_;
};

JointPolicyModel load_joint_model(const std::filesystem::path& path);
JointPolicyModel parse_joint_model(std::string_view json, const std::string& source = "<memory>");
std::string format_joint_model(const JointPolicyModel& model);

/// Recursive memory update y' = g(t, z, y) on [H] x Z x [K]. States are
/// 0-based here; state 0 is the initial memory Y_0.
class MemoryFunction {
public:
    MemoryFunction(std::size_t horizon, std::size_t n_z, std::size_t capacity);

    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t n_z() const noexcept { return n_z_; }
    std::size_t capacity() const noexcept { return capacity_; }

    /// t is 1-based.
    std::uint32_t next(std::size_t t, std::uint32_t z, std::uint32_t y) const {
        return table_.at(index(t, z, y));
    }
    void set(std::size_t t, std::uint32_t z, std::uint32_t y, std::uint32_t value);

private:
    std::size_t index(std::size_t t, std::uint32_t z, std::uint32_t y) const;

    std::size_t horizon_, n_z_, capacity_;
    std::vector<std::uint32_t> table_;
};

/// Checks P(A_t | X_t, Y_{t-1}) == P(A_t | X_t, Z_{1:t-1}) on the support for
/// every t, folding g from Y_0. Throws std::invalid_argument on an
/// alphabet or horizon mismatch.
bool is_memory_function_for(const MemoryFunction& g, const JointPolicyModel& model,
                            double tolerance = 1e-9);

struct CapacityOptions {
    std::size_t k_max = 3;
    /// Maximum label assignments tried across all K before BudgetError.
    std::uint64_t node_budget = 20'000'000;
    double tolerance = 1e-9;
};

struct CapacityResult {
    /// Empty when no memory function with K <= k_max exists.
    std::optional<std::size_t> capacity;
    std::size_t k_max = 0;
    std::optional<MemoryFunction> witness;
    std::uint64_t nodes = 0;
};

/// Smallest K <= k_max admitting a memory function for the model.
CapacityResult capacity(const JointPolicyModel& model, const CapacityOptions& options = {});

/// Population I(A_t; Z_{t-i} | X_t, Z_{t-i+1:t-1}) in nats, 1 <= i < t <= H,
/// optionally under P restricted to `event`.
double exact_cmi(const JointPolicyModel& model, std::size_t t, std::size_t i,
                 const EventPredicate& event = {});

/// Population I(A_t; Z_{1:k} | X_t, Z_{k+1:t-1}) for 0 <= k < t.
double exact_history_information(const JointPolicyModel& model, std::size_t t, std::size_t k,
                                 const EventPredicate& event = {});

/// Probability of `event` at decision time t.
double event_probability(const JointPolicyModel& model, std::size_t t, const EventPredicate& event);

/// Population value targeted by the pooled estimator: samples from every
/// t in [min_t, H] weighted equally, lag 0 giving I(A; X).
double exact_pooled_memory(const JointPolicyModel& model, std::size_t lag, std::size_t min_t);

struct NamedEvent {
    std::string name;
    EventPredicate predicate;
};

struct BoundCheck {
    std::size_t t = 0;
    std::string event;  // empty for the unrestricted measure
    double event_probability = 1.0;
    double memory_sum = 0.0;  // sum_{i=1}^{t-1} M_i
    double log_capacity = 0.0;
    double gap = 0.0;  // log_capacity - memory_sum
    bool holds = true;
};

struct BoundReport {
    CapacityResult capacity;
    /// False when the capacity exceeds k_max, in which case no checks run.
    bool determined = false;
    double log_capacity = 0.0;
    std::vector<BoundCheck> checks;
    bool all_hold = true;
};

/// For every t (and every event with positive probability at t) checks
/// sum_{i=1}^{t-1} M_i <= ln C(pi) + tolerance.
BoundReport verify_lower_bound(const JointPolicyModel& model, const CapacityOptions& options = {},
                               std::span<const NamedEvent> events = {}, double tolerance = 1e-9);

}  // namespace memlens
