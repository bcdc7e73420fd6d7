#pragma once

#include "memlens/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace memlens {

enum class Estimator { plugin, grassberger };

std::string_view to_string(Estimator e) noexcept;
std::optional<Estimator> parse_estimator(std::string_view name) noexcept;

/// Digamma function for x > 0. Upward recurrence to x >= 10 followed by the
/// asymptotic expansion through the x^-14 term; absolute error below 1e-14 on
/// the half-integer grid.
double digamma(double x);

/// Grassberger's correction G(n) = psi(n) + (-1)^n / 2 * (psi((n+1)/2) - psi(n/2)).
/// Values up to 2^20 are memoized per thread.
double grassberger_G(std::uint64_t n);

/// Multiset of fixed-arity tuples of symbol ids.
class CountTable {
public:
    using Key = std::vector<std::uint32_t>;

    explicit CountTable(std::size_t arity) : arity_(arity) {}

    void add(const Key& key, std::uint64_t n = 1);
    /// Key-wise addition; both tables must share arity.
    void merge(const CountTable& other);

    std::uint64_t count(const Key& key) const;
    std::uint64_t total() const noexcept { return total_; }
    std::size_t distinct() const noexcept { return counts_.size(); }
    std::size_t arity() const noexcept { return arity_; }

    /// Counts in ascending order. Entropy sums run in this order so results do
    /// not depend on hash-table layout.
    std::vector<std::uint64_t> sorted_counts() const;

    auto begin() const { return counts_.begin(); }
    auto end() const { return counts_.end(); }

private:
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    std::size_t arity_;
    std::uint64_t total_ = 0;
    std::unordered_map<Key, std::uint64_t, KeyHash> counts_;
};

/// Which fields of a LagSample enter a tuple. History contributes its
/// `history_depth` most recent steps as full (x, a, r) triples.
struct Projection {
    bool x_now = false;
    bool a_now = false;
    std::size_t history_depth = 0;

    std::size_t arity() const noexcept {
        return (x_now ? 1 : 0) + (a_now ? 1 : 0) + 3 * history_depth;
    }
};

/// Appends the projected tuple of `s` to `key`.
void project_into(const LagSample& s, const Projection& p, CountTable::Key& key);

CountTable build_count_table(std::span<const LagSample> samples, const Projection& projection);

struct EntropyEstimate {
    double nats = 0.0;
    Estimator estimator = Estimator::grassberger;
    std::uint64_t n_samples = 0;
    std::size_t n_distinct = 0;
};

EntropyEstimate entropy(const CountTable& table, Estimator estimator);

/// Entropy from a raw list of positive counts, summed in the given order.
double entropy_of_counts(std::span<const std::uint64_t> counts, Estimator estimator);

/// Streaming form of the two estimators for callers that already know N:
///   plug-in      H = -sum (n/N) ln(n/N)
///   Grassberger  H = ln N - (1/N) sum n G(n)
class EntropyAccumulator {
public:
    EntropyAccumulator(Estimator estimator, std::uint64_t total) noexcept
        : estimator_(estimator), total_(static_cast<double>(total)) {}

    void add(std::uint64_t n) noexcept;
    double value() const noexcept;

private:
    Estimator estimator_;
    double total_;
    double sum_ = 0.0;
};

}  // namespace memlens
