#include "memlens/capacity.hpp"

#include "memlens/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace memlens {

JointPolicyModel::JointPolicyModel(std::size_t horizon, SymbolTable x_table, SymbolTable a_table,
                                   SymbolTable r_table, std::vector<WeightedEpisode> episodes,
                                   double normalization_tolerance)
    : horizon_(horizon), x_(std::move(x_table)), a_(std::move(a_table)), r_(std::move(r_table)) {
    if (horizon_ < 1) throw InputError("joint model horizon must be at least 1");
    if (n_z() == 0) throw InputError("joint model alphabets must be non-empty");
    std::map<std::vector<StepRecord>, double> merged;
    double total = 0.0;
    for (auto& e : episodes) {
        if (e.z.size() != horizon_)
            throw InputError("episode of length " + std::to_string(e.z.size()) +
                             " in a model with horizon " + std::to_string(horizon_));
        for (const auto& s : e.z)
            if (!x_.contains(s.x) || !a_.contains(s.a) || !r_.contains(s.r))
                throw InputError("episode step outside the model alphabet");
        if (!std::isfinite(e.p) || e.p < 0.0) throw InputError("episode probabilities must be >= 0");
        total += e.p;
        if (e.p > 0.0) merged[std::move(e.z)] += e.p;
    }
    if (std::fabs(total - 1.0) > normalization_tolerance)
        throw InputError("episode probabilities sum to " + std::to_string(total) +
                         ", expected 1 (normalization error)");
    episodes_.reserve(merged.size());
    for (auto& [z, p] : merged) episodes_.push_back(WeightedEpisode{z, p});
}

MemoryFunction::MemoryFunction(std::size_t horizon, std::size_t n_z, std::size_t capacity)
    : horizon_(horizon), n_z_(n_z), capacity_(capacity), table_(horizon * n_z * capacity, 0) {
    if (capacity_ < 1) throw std::invalid_argument("memory capacity must be at least 1");
}

std::size_t MemoryFunction::index(std::size_t t, std::uint32_t z, std::uint32_t y) const {
    if (t < 1 || t > horizon_ || z >= n_z_ || y >= capacity_)
        throw std::out_of_range("memory function argument out of range");
    return ((t - 1) * n_z_ + z) * capacity_ + y;
}

void MemoryFunction::set(std::size_t t, std::uint32_t z, std::uint32_t y, std::uint32_t value) {
    if (value >= capacity_) throw std::out_of_range("memory state out of range");
    table_[index(t, z, y)] = value;
}

namespace {

using Key = std::vector<std::uint32_t>;
using Distribution = std::vector<double>;

struct DecisionPoint {
    double mass = 0.0;
    Distribution action_mass;
};

/// decision_points[t][(Z_{1:t-1}, X_t)] for t = 1..H (index 0 unused).
using DecisionMap = std::map<std::pair<Key, std::uint32_t>, DecisionPoint>;

std::vector<DecisionMap> decision_points(const JointPolicyModel& m) {
    std::vector<DecisionMap> out(m.horizon() + 1);
    for (const auto& e : m.episodes()) {
        Key prefix;
        for (std::size_t t = 1; t <= m.horizon(); ++t) {
            const auto& step = e.z[t - 1];
            auto& d = out[t][{prefix, step.x.id}];
            if (d.action_mass.empty()) d.action_mass.assign(m.n_a(), 0.0);
            d.mass += e.p;
            d.action_mass[step.a.id] += e.p;
            prefix.push_back(m.z_index(step));
        }
    }
    return out;
}

Distribution normalized(const Distribution& mass, double total) {
    Distribution out(mass);
    for (auto& v : out) v /= total;
    return out;
}

bool same_distribution(const Distribution& a, const Distribution& b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::fabs(a[i] - b[i]) > tol) return false;
    return true;
}

// ---- capacity search -------------------------------------------------------

/// Support prefixes Z_{1:t} of one length. signature[p][x] is
/// P(A_{t+1} | X_{t+1} = x, Z_{1:t} = p), empty where (p, x) is off-support.
struct PrefixLevel {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> z;
    std::vector<std::vector<Distribution>> signature;
};

std::vector<PrefixLevel> build_levels(const JointPolicyModel& m, const std::vector<DecisionMap>& dp) {
    const auto H = m.horizon();
    std::vector<PrefixLevel> levels(H);
    std::vector<std::map<Key, std::uint32_t>> index(H);
    index[0][Key{}] = 0;
    levels[0].parent.push_back(0);
    levels[0].z.push_back(0);
    for (std::size_t t = 1; t < H; ++t) {
        for (const auto& e : m.episodes()) {
            Key prefix;
            for (std::size_t s = 0; s < t; ++s) prefix.push_back(m.z_index(e.z[s]));
            index[t].try_emplace(prefix, 0);
        }
        std::uint32_t next = 0;
        for (auto& [prefix, idx] : index[t]) {
            idx = next++;
            const Key parent_key(prefix.begin(), prefix.end() - 1);
            levels[t].parent.push_back(index[t - 1].at(parent_key));
            levels[t].z.push_back(prefix.back());
        }
    }
    for (std::size_t t = 0; t < H; ++t) {
        levels[t].signature.assign(index[t].size(), std::vector<Distribution>(m.n_x()));
        for (const auto& [key, d] : dp[t + 1]) {
            const auto p = index[t].at(key.first);
            levels[t].signature[p][key.second] = normalized(d.action_mass, d.mass);
        }
    }
    return levels;
}

/// Merges `sig` into `into`; false on a conflicting conditional. When
/// `newly_set` is given it receives the x values that were filled in.
bool merge_signature(std::vector<Distribution>& into, const std::vector<Distribution>& sig,
                     double tol, std::vector<std::uint32_t>* newly_set) {
    for (std::size_t x = 0; x < sig.size(); ++x) {
        if (sig[x].empty()) continue;
        if (into[x].empty()) {
            into[x] = sig[x];
            if (newly_set) newly_set->push_back(static_cast<std::uint32_t>(x));
        } else if (!same_distribution(into[x], sig[x], tol)) {
            return false;
        }
    }
    return true;
}

bool compatible(const std::vector<Distribution>& a, const std::vector<Distribution>& b, double tol) {
    for (std::size_t x = 0; x < a.size(); ++x)
        if (!a[x].empty() && !b[x].empty() && !same_distribution(a[x], b[x], tol)) return false;
    return true;
}

class CapacitySearch {
public:
    CapacitySearch(const std::vector<PrefixLevel>& levels, std::size_t K, std::size_t n_x,
                   double tol, std::uint64_t& nodes, std::uint64_t budget)
        : levels_(levels), K_(K), n_x_(n_x), tol_(tol), nodes_(nodes), budget_(budget),
          labels_(levels.size()), choices_(levels.size()) {
        labels_[0].assign(1, 0);
    }

    bool run() { return levels_.size() <= 1 || solve_level(1); }

    /// (t, z, y_prev, y) entries of the memory function found by run().
    const std::vector<std::vector<std::array<std::uint32_t, 3>>>& choices() const { return choices_; }

private:
    struct Group {
        std::uint32_t z, y_prev;
        std::vector<std::uint32_t> members;
        std::vector<Distribution> signature;
    };

    bool solve_level(std::size_t t) {
        const auto& level = levels_[t];
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> group_index;
        std::vector<Group> groups;
        for (std::uint32_t p = 0; p < level.z.size(); ++p) {
            const auto key = std::make_pair(level.z[p], labels_[t - 1][level.parent[p]]);
            auto [it, inserted] = group_index.try_emplace(key, static_cast<std::uint32_t>(groups.size()));
            if (inserted) groups.push_back(Group{key.first, key.second, {}, std::vector<Distribution>(n_x_)});
            groups[it->second].members.push_back(p);
        }
        // Groups share g(t, z, y_prev) by construction; an internal conflict
        // means an earlier level merged histories it must keep apart.
        for (auto& g : groups)
            for (auto p : g.members)
                if (!merge_signature(g.signature, level.signature[p], tol_, nullptr)) return false;

        std::vector<std::vector<Distribution>> label_sig(K_, std::vector<Distribution>(n_x_));
        std::vector<std::uint32_t> assigned(groups.size(), 0);
        return assign(t, groups, label_sig, assigned, 0, 0);
    }

    bool assign(std::size_t t, const std::vector<Group>& groups,
                std::vector<std::vector<Distribution>>& label_sig,
                std::vector<std::uint32_t>& assigned, std::size_t g, std::uint32_t used) {
        if (g == groups.size()) return descend(t, groups, assigned);
        // Canonical labeling: a group may reuse a label or open the next one.
        const auto limit = std::min<std::size_t>(used + 1, K_);
        for (std::uint32_t label = 0; label < limit; ++label) {
            if (++nodes_ > budget_)
                throw BudgetError("capacity search exceeded its budget of " +
                                  std::to_string(budget_) + " nodes at K=" + std::to_string(K_));
            if (!compatible(label_sig[label], groups[g].signature, tol_)) continue;
            std::vector<std::uint32_t> filled;
            merge_signature(label_sig[label], groups[g].signature, tol_, &filled);
            assigned[g] = label;
            if (assign(t, groups, label_sig, assigned, g + 1, std::max<std::uint32_t>(used, label + 1)))
                return true;
            for (auto x : filled) label_sig[label][x].clear();
        }
        return false;
    }

    bool descend(std::size_t t, const std::vector<Group>& groups,
                 const std::vector<std::uint32_t>& assigned) {
        const auto& level = levels_[t];
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> label_of;
        choices_[t].clear();
        for (std::size_t g = 0; g < groups.size(); ++g) {
            label_of[{groups[g].z, groups[g].y_prev}] = assigned[g];
            choices_[t].push_back({groups[g].z, groups[g].y_prev, assigned[g]});
        }
        labels_[t].resize(level.z.size());
        for (std::uint32_t p = 0; p < level.z.size(); ++p)
            labels_[t][p] = label_of.at({level.z[p], labels_[t - 1][level.parent[p]]});
        if (t + 1 == levels_.size()) return true;
        return solve_level(t + 1);
    }

    const std::vector<PrefixLevel>& levels_;
    std::size_t K_, n_x_;
    double tol_;
    std::uint64_t& nodes_;
    std::uint64_t budget_;
    std::vector<std::vector<std::uint32_t>> labels_;
    std::vector<std::vector<std::array<std::uint32_t, 3>>> choices_;
};

// ---- exact information -----------------------------------------------------

Key concat(std::initializer_list<const Key*> parts) {
    Key out;
    for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
    return out;
}

/// Accumulates weighted (a, b, c) tuples of fixed arities and evaluates
/// I(A; B | C) = sum p(abc) ln [p(abc) p(c) / (p(ac) p(bc))].
class InformationAccumulator {
public:
    void add(const Key& a, const Key& b, const Key& c, double w) {
        if (w <= 0.0) return;
        abc_[concat({&a, &b, &c})] += w;
        ac_[concat({&a, &c})] += w;
        bc_[concat({&b, &c})] += w;
        c_[c] += w;
        total_ += w;
        a_arity_ = a.size();
        b_arity_ = b.size();
    }

    double total() const noexcept { return total_; }

    double value() const {
        double info = 0.0;
        for (const auto& [key, w] : abc_) {
            const Key a(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(a_arity_));
            const Key b(key.begin() + static_cast<std::ptrdiff_t>(a_arity_),
                        key.begin() + static_cast<std::ptrdiff_t>(a_arity_ + b_arity_));
            const Key c(key.begin() + static_cast<std::ptrdiff_t>(a_arity_ + b_arity_), key.end());
            const double ratio = (w * c_.at(c)) / (ac_.at(concat({&a, &c})) * bc_.at(concat({&b, &c})));
            info += (w / total_) * std::log(ratio);
        }
        // Exact summation is nonnegative; clip rounding residue.
        return std::max(0.0, info);
    }

private:
    std::map<Key, double> abc_, ac_, bc_, c_;
    double total_ = 0.0;
    std::size_t a_arity_ = 0, b_arity_ = 0;
};

Key z_range(const JointPolicyModel& m, const WeightedEpisode& e, std::size_t from, std::size_t to) {
    // Z_from..Z_to, 1-based inclusive; empty when from > to.
    Key out;
    for (std::size_t s = from; s <= to && s >= 1; ++s) out.push_back(m.z_index(e.z[s - 1]));
    return out;
}

bool in_event(const WeightedEpisode& e, std::size_t t, const EventPredicate& event) {
    if (!event) return true;
    return event(std::span<const StepRecord>(e.z.data(), t - 1), e.z[t - 1].x);
}

}  // namespace

bool is_memory_function_for(const MemoryFunction& g, const JointPolicyModel& model, double tolerance) {
    if (g.horizon() != model.horizon() || g.n_z() != model.n_z())
        throw std::invalid_argument("memory function and model disagree on horizon or alphabet");
    const auto dp = decision_points(model);
    for (std::size_t t = 1; t <= model.horizon(); ++t) {
        // Fold g over each support prefix, then pool decision points by (X_t, Y_{t-1}).
        std::map<std::pair<std::uint32_t, std::uint32_t>, DecisionPoint> pooled;
        std::vector<std::uint32_t> memory;
        memory.reserve(dp[t].size());
        for (const auto& [key, d] : dp[t]) {
            std::uint32_t y = 0;
            for (std::size_t s = 1; s < t; ++s) y = g.next(s, key.first[s - 1], y);
            memory.push_back(y);
            auto& slot = pooled[{key.second, y}];
            if (slot.action_mass.empty()) slot.action_mass.assign(model.n_a(), 0.0);
            slot.mass += d.mass;
            for (std::size_t a = 0; a < model.n_a(); ++a) slot.action_mass[a] += d.action_mass[a];
        }
        std::size_t i = 0;
        for (const auto& [key, d] : dp[t]) {
            const auto& mix = pooled.at({key.second, memory[i++]});
            if (!same_distribution(normalized(mix.action_mass, mix.mass),
                                   normalized(d.action_mass, d.mass), tolerance))
                return false;
        }
    }
    return true;
}

CapacityResult capacity(const JointPolicyModel& model, const CapacityOptions& options) {
    if (options.k_max < 1) throw std::invalid_argument("k_max must be at least 1");
    const auto dp = decision_points(model);
    const auto levels = build_levels(model, dp);

    CapacityResult result;
    result.k_max = options.k_max;
    for (std::size_t K = 1; K <= options.k_max; ++K) {
        CapacitySearch search(levels, K, model.n_x(), options.tolerance, result.nodes, options.node_budget);
        if (!search.run()) continue;
        MemoryFunction g(model.horizon(), model.n_z(), K);
        for (std::size_t t = 1; t < levels.size(); ++t)
            for (const auto& [z, y_prev, y] : search.choices()[t]) g.set(t, z, y_prev, y);
        result.capacity = K;
        result.witness = std::move(g);
        return result;
    }
    return result;
}

double exact_history_information(const JointPolicyModel& model, std::size_t t, std::size_t k,
                                 const EventPredicate& event) {
    if (t < 1 || t > model.horizon() || k >= t)
        throw std::invalid_argument("need 0 <= k < t <= H");
    InformationAccumulator acc;
    for (const auto& e : model.episodes()) {
        if (!in_event(e, t, event)) continue;
        const Key a{e.z[t - 1].a.id};
        const Key b = z_range(model, e, 1, k);
        Key c{e.z[t - 1].x.id};
        const auto rest = z_range(model, e, k + 1, t - 1);
        c.insert(c.end(), rest.begin(), rest.end());
        acc.add(a, b, c, e.p);
    }
    if (acc.total() <= 0.0) throw NoSamplesError("event has probability zero");
    return acc.value();
}

double exact_cmi(const JointPolicyModel& model, std::size_t t, std::size_t i,
                 const EventPredicate& event) {
    if (i < 1 || i >= t || t > model.horizon()) throw std::invalid_argument("need 1 <= i < t <= H");
    InformationAccumulator acc;
    for (const auto& e : model.episodes()) {
        if (!in_event(e, t, event)) continue;
        const Key a{e.z[t - 1].a.id};
        const Key b{model.z_index(e.z[t - 1 - i])};
        Key c{e.z[t - 1].x.id};
        const auto rest = z_range(model, e, t - i + 1, t - 1);
        c.insert(c.end(), rest.begin(), rest.end());
        acc.add(a, b, c, e.p);
    }
    if (acc.total() <= 0.0) throw NoSamplesError("event has probability zero");
    return acc.value();
}

double event_probability(const JointPolicyModel& model, std::size_t t, const EventPredicate& event) {
    if (t < 1 || t > model.horizon()) throw std::invalid_argument("need 1 <= t <= H");
    double mass = 0.0;
    for (const auto& e : model.episodes())
        if (in_event(e, t, event)) mass += e.p;
    return mass;
}

double exact_pooled_memory(const JointPolicyModel& model, std::size_t lag, std::size_t min_t) {
    const auto H = model.horizon();
    if (min_t < lag + 1 || min_t > H) throw std::invalid_argument("need lag + 1 <= min_t <= H");
    const double share = 1.0 / static_cast<double>(H - min_t + 1);
    InformationAccumulator acc;
    for (const auto& e : model.episodes()) {
        for (std::size_t t = min_t; t <= H; ++t) {
            const Key a{e.z[t - 1].a.id};
            if (lag == 0) {
                acc.add(a, Key{e.z[t - 1].x.id}, Key{}, e.p * share);
            } else {
                Key c{e.z[t - 1].x.id};
                const auto rest = z_range(model, e, t - lag + 1, t - 1);
                c.insert(c.end(), rest.begin(), rest.end());
                acc.add(a, Key{model.z_index(e.z[t - 1 - lag])}, c, e.p * share);
            }
        }
    }
    return acc.value();
}

BoundReport verify_lower_bound(const JointPolicyModel& model, const CapacityOptions& options,
                               std::span<const NamedEvent> events, double tolerance) {
    BoundReport report;
    report.capacity = capacity(model, options);
    if (!report.capacity.capacity) return report;
    report.determined = true;
    report.log_capacity = std::log(static_cast<double>(*report.capacity.capacity));

    auto check = [&](std::size_t t, const std::string& name, const EventPredicate& event) {
        BoundCheck c;
        c.t = t;
        c.event = name;
        c.event_probability = event ? event_probability(model, t, event) : 1.0;
        if (c.event_probability <= 0.0) return;
        for (std::size_t i = 1; i < t; ++i) c.memory_sum += exact_cmi(model, t, i, event);
        c.log_capacity = report.log_capacity;
        c.gap = c.log_capacity - c.memory_sum;
        c.holds = c.memory_sum <= c.log_capacity + tolerance;
        report.all_hold = report.all_hold && c.holds;
        report.checks.push_back(std::move(c));
    };
    for (std::size_t t = 1; t <= model.horizon(); ++t) {
        check(t, "", EventPredicate{});
        for (const auto& e : events) check(t, e.name, e.predicate);
    }
    return report;
}

}  // namespace memlens
