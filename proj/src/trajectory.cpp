#include "memlens/trajectory.hpp"

#include "memlens/error.hpp"

#include <stdexcept>

namespace memlens {

TrajectoryDataset::TrajectoryDataset(std::vector<Trajectory> trajectories, SymbolTable x_table,
                                     SymbolTable a_table, SymbolTable r_table)
    : trajectories_(std::move(trajectories)),
      x_table_(std::move(x_table)),
      a_table_(std::move(a_table)),
      r_table_(std::move(r_table)) {
    for (const auto& traj : trajectories_) {
        if (traj.steps.empty()) throw InputError("empty episode '" + traj.id + "'");
        for (const auto& s : traj.steps) {
            if (!x_table_.contains(s.x) || !a_table_.contains(s.a) || !r_table_.contains(s.r))
                throw std::invalid_argument("step symbol outside its table in episode '" +
                                            traj.id + "'");
        }
    }
}

std::size_t TrajectoryDataset::total_steps() const noexcept {
    std::size_t n = 0;
    for (const auto& t : trajectories_) n += t.steps.size();
    return n;
}

StepRecord DatasetBuilder::intern(std::string_view x, std::string_view a, std::string_view r) {
    return StepRecord{x_.intern(x), a_.intern(a), r_.intern(r)};
}

void DatasetBuilder::add(std::string id, std::vector<StepRecord> steps) {
    trajectories_.push_back(Trajectory{std::move(id), std::move(steps)});
}

TrajectoryDataset DatasetBuilder::build() && {
    return TrajectoryDataset(std::move(trajectories_), std::move(x_), std::move(a_), std::move(r_));
}

std::vector<LagSample> extract_samples(const TrajectoryDataset& ds, std::size_t lag,
                                       std::size_t min_t, const EventPredicate& event) {
    if (min_t < lag + 1)
        throw std::invalid_argument("min_t must be at least lag + 1 (lag " + std::to_string(lag) +
                                    ", min_t " + std::to_string(min_t) + ")");
    std::vector<LagSample> out;
    for (const auto& traj : ds.trajectories()) {
        const auto& steps = traj.steps;
        // t is 1-based; step t lives at index t - 1.
        for (std::size_t t = min_t; t <= steps.size(); ++t) {
            const std::span<const StepRecord> prefix(steps.data(), t - 1);
            const StepRecord& now = steps[t - 1];
            if (event && !event(prefix, now.x)) continue;
            LagSample s;
            s.history.assign(steps.begin() + static_cast<std::ptrdiff_t>(t - 1 - lag),
                             steps.begin() + static_cast<std::ptrdiff_t>(t - 1));
            s.x_now = now.x;
            s.a_now = now.a;
            out.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace memlens
