#include "memlens/entropy.hpp"

#include "memlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace memlens {

std::string_view to_string(Estimator e) noexcept {
    return e == Estimator::plugin ? "plugin" : "grassberger";
}

std::optional<Estimator> parse_estimator(std::string_view name) noexcept {
    if (name == "plugin") return Estimator::plugin;
    if (name == "grassberger") return Estimator::grassberger;
    return std::nullopt;
}

double digamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument("digamma requires a finite x > 0");
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    // Bernoulli-number series: 1/(12x^2) - 1/(120x^4) + 1/(252x^6) - 1/(240x^8)
    // + 1/(132x^10) - 691/(32760x^12) + 1/(12x^14)
    const double inv2 = 1.0 / (x * x);
    const double tail =
        inv2 *
        (1.0 / 12 -
         inv2 * (1.0 / 120 -
                 inv2 * (1.0 / 252 -
                         inv2 * (1.0 / 240 -
                                 inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
    return shift + std::log(x) - 0.5 / x - tail;
}

namespace {

constexpr std::uint64_t kMemoLimit = std::uint64_t{1} << 20;

double grassberger_direct(std::uint64_t n) {
    const double dn = static_cast<double>(n);
    const double parity = (n % 2 == 0) ? 0.5 : -0.5;
    return digamma(dn) + parity * (digamma((dn + 1.0) / 2.0) - digamma(dn / 2.0));
}

}  // namespace

double grassberger_G(std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("grassberger_G requires n >= 1");
    if (n >= kMemoLimit) return grassberger_direct(n);
    thread_local std::vector<double> memo{0.0};  // index 0 unused
    if (n >= memo.size()) {
        const auto target = std::min<std::uint64_t>(std::max<std::uint64_t>(n + 1, memo.size() * 2),
                                                    kMemoLimit);
        for (auto k = memo.size(); k < target; ++k) memo.push_back(grassberger_direct(k));
    }
    return memo[n];
}

std::size_t CountTable::KeyHash::operator()(const Key& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : k) {
        h ^= v;
        h *= 1099511628211ull;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

void CountTable::add(const Key& key, std::uint64_t n) {
    if (key.size() != arity_)
        throw std::invalid_argument("count table key arity " + std::to_string(key.size()) +
                                    " != " + std::to_string(arity_));
    if (n == 0) return;
    counts_[key] += n;
    total_ += n;
}

void CountTable::merge(const CountTable& other) {
    if (other.arity_ != arity_) throw std::invalid_argument("cannot merge tables of different arity");
    for (const auto& [key, n] : other.counts_) {
        counts_[key] += n;
        total_ += n;
    }
}

std::uint64_t CountTable::count(const Key& key) const {
    auto it = counts_.find(key);
    return it == counts_.end() ? 0 : it->second;
}

std::vector<std::uint64_t> CountTable::sorted_counts() const {
    std::vector<std::uint64_t> out;
    out.reserve(counts_.size());
    for (const auto& [key, n] : counts_) out.push_back(n);
    std::sort(out.begin(), out.end());
    return out;
}

void project_into(const LagSample& s, const Projection& p, CountTable::Key& key) {
    if (p.x_now) key.push_back(s.x_now.id);
    if (p.a_now) key.push_back(s.a_now.id);
    const auto& h = s.history;
    for (std::size_t back = 1; back <= p.history_depth; ++back) {
        const auto& z = h[h.size() - back];
        key.push_back(z.x.id);
        key.push_back(z.a.id);
        key.push_back(z.r.id);
    }
}

CountTable build_count_table(std::span<const LagSample> samples, const Projection& projection) {
    if (samples.empty()) throw NoSamplesError("cannot build a count table from zero samples");
    if (projection.arity() == 0) throw std::invalid_argument("projection selects no fields");
    const auto lag = samples.front().history.size();
    if (projection.history_depth > lag)
        throw std::invalid_argument("projection history depth exceeds sample lag");
    CountTable table(projection.arity());
    CountTable::Key key;
    key.reserve(projection.arity());
    for (const auto& s : samples) {
        if (s.history.size() != lag) throw std::invalid_argument("samples mix different lags");
        key.clear();
        project_into(s, projection, key);
        table.add(key);
    }
    return table;
}

void EntropyAccumulator::add(std::uint64_t n) noexcept {
    if (estimator_ == Estimator::plugin) {
        const double p = static_cast<double>(n) / total_;
        sum_ -= p * std::log(p);
    } else {
        sum_ += static_cast<double>(n) * grassberger_G(n);
    }
}

double EntropyAccumulator::value() const noexcept {
    if (estimator_ == Estimator::plugin) return sum_;
    return std::log(total_) - sum_ / total_;
}

double entropy_of_counts(std::span<const std::uint64_t> counts, Estimator estimator) {
    std::uint64_t total = 0;
    for (auto n : counts) {
        if (n == 0) throw std::invalid_argument("entropy counts must be positive");
        total += n;
    }
    if (total == 0) throw NoSamplesError("entropy of an empty table");
    EntropyAccumulator acc(estimator, total);
    for (auto n : counts) acc.add(n);
    return acc.value();
}

EntropyEstimate entropy(const CountTable& table, Estimator estimator) {
    if (table.total() == 0) throw NoSamplesError("entropy of an empty table");
    const auto counts = table.sorted_counts();
    return EntropyEstimate{entropy_of_counts(counts, estimator), estimator, table.total(),
                           table.distinct()};
}

}  // namespace memlens
