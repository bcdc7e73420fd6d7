#pragma once

#include "memlens/symbol_table.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace memlens {

/// One time step Z_t = (X_t, A_t, R_t). Each field indexes its own table.
struct StepRecord {
    Symbol x;
    Symbol a;
    Symbol r;

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
    friend auto operator<=>(const StepRecord&, const StepRecord&) = default;
};

struct Trajectory {
    std::string id;
    std::vector<StepRecord> steps;
};

/// Immutable collection of episodes with separate observation, action and
/// reward alphabets. Construct through DatasetBuilder or the constructor,
/// which validates every symbol against its table.
class TrajectoryDataset {
public:
    TrajectoryDataset(std::vector<Trajectory> trajectories, SymbolTable x_table,
                      SymbolTable a_table, SymbolTable r_table);

    const std::vector<Trajectory>& trajectories() const noexcept { return trajectories_; }
    const SymbolTable& x_table() const noexcept { return x_table_; }
    const SymbolTable& a_table() const noexcept { return a_table_; }
    const SymbolTable& r_table() const noexcept { return r_table_; }

    std::size_t size() const noexcept { return trajectories_.size(); }
    std::size_t total_steps() const noexcept;

private:
    std::vector<Trajectory> trajectories_;
    SymbolTable x_table_;
    SymbolTable a_table_;
    SymbolTable r_table_;
};

/// Accumulates episodes from raw tokens, interning as it goes.
class DatasetBuilder {
public:
    StepRecord intern(std::string_view x, std::string_view a, std::string_view r);
    void add(std::string id, std::vector<StepRecord> steps);
    TrajectoryDataset build() &&;

private:
    std::vector<Trajectory> trajectories_;
    SymbolTable x_, a_, r_;
};

/// Aligned sample for lag i: the i full steps before t (oldest first), then
/// the observation and action at t.
struct LagSample {
    std::vector<StepRecord> history;
    Symbol x_now;
    Symbol a_now;
};

/// Event over (Z_1..Z_{t-1}, X_t). The prefix is the full episode history
/// before t, so t == prefix.size() + 1. Must never look at A_t.
using EventPredicate = std::function<bool(std::span<const StepRecord> prefix, Symbol x_now)>;

/// One sample per (trajectory, t) with min_t <= t <= length, in episode order
/// then t order. Throws std::invalid_argument when min_t < lag + 1.
std::vector<LagSample> extract_samples(const TrajectoryDataset& ds, std::size_t lag,
                                       std::size_t min_t, const EventPredicate& event = {});

/// Reads the JSON Lines trajectory format. Rewards must already be discrete.
TrajectoryDataset load_dataset(const std::filesystem::path& path);
TrajectoryDataset parse_dataset(std::string_view jsonl, const std::string& source = "<memory>");

/// Writes the JSON Lines format; tokens that are canonical integers are
/// written as JSON integers, all others as strings.
void write_dataset(const TrajectoryDataset& ds, const std::filesystem::path& path);
std::string format_dataset(const TrajectoryDataset& ds);

struct DiscretizeSummary {
    std::size_t bins = 0;
    std::size_t n_rewards = 0;
    /// Upper edges of bins 0..bins-2; value v goes to the number of edges below v.
    std::vector<double> boundaries;
    std::vector<std::size_t> counts;
    std::size_t occupied_bins = 0;
};

/// Replaces numeric rewards by quantile-bin tokens q0..q{bins-1} computed over
/// the pooled reward distribution. All other fields are carried over.
DiscretizeSummary discretize_rewards(const std::filesystem::path& in,
                                     const std::filesystem::path& out, std::size_t bins);

/// Bin edges used by discretize_rewards: the lower empirical quantile at
/// j / bins for j = 1..bins-1.
std::vector<double> quantile_boundaries(std::vector<double> values, std::size_t bins);
std::size_t bin_of(double value, std::span<const double> boundaries);

}  // namespace memlens
