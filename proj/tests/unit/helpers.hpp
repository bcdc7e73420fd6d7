#pragma once

#include "memlens/trajectory.hpp"

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace testutil {

// psi at positive integers and half-integers from closed forms, in long double.
inline long double psi_reference(long double x) {
    constexpr long double gamma = 0.577215664901532860606512090082402431L;
    const long double twice = 2.0L * x;
    const long long m = std::llround(twice);
    long double sum = 0.0L;
    if (m % 2 == 0) {
        for (long long k = 1; k < m / 2; ++k) sum += 1.0L / static_cast<long double>(k);
        return -gamma + sum;
    }
    const long long n = (m - 1) / 2;
    for (long long k = 1; k <= n; ++k) sum += 2.0L / static_cast<long double>(2 * k - 1);
    return -gamma - 2.0L * std::log(2.0L) + sum;
}

inline long double G_reference(long long n) {
    const long double sign = (n % 2 == 0) ? 1.0L : -1.0L;
    return psi_reference(n) +
           sign / 2.0L * (psi_reference((n + 1) / 2.0L) - psi_reference(n / 2.0L));
}

inline double plugin_reference(const std::vector<std::uint64_t>& counts) {
    long double n = 0, h = 0;
    for (auto c : counts) n += c;
    for (auto c : counts) h -= (c / n) * std::log(c / n);
    return static_cast<double>(h);
}

inline double grassberger_reference(const std::vector<std::uint64_t>& counts) {
    long double n = 0, s = 0;
    for (auto c : counts) n += c;
    for (auto c : counts) s += c * G_reference(static_cast<long long>(c));
    return static_cast<double>(std::log(n) - s / n);
}

// Builds a dataset from integer episodes given as (x, a, r) triples.
using Episode = std::vector<std::array<int, 3>>;

inline memlens::TrajectoryDataset make_dataset(const std::vector<Episode>& episodes) {
    memlens::DatasetBuilder b;
    int k = 0;
    for (const auto& ep : episodes) {
        std::vector<memlens::StepRecord> steps;
        for (const auto& z : ep)
            steps.push_back(b.intern(std::to_string(z[0]), std::to_string(z[1]), std::to_string(z[2])));
        b.add("ep" + std::to_string(k++), std::move(steps));
    }
    return std::move(b).build();
}

// Entropy of a list of keys, counted with std::map.
template <typename Key>
double keyed_entropy(const std::vector<Key>& keys, bool grassberger) {
    std::map<Key, std::uint64_t> counts;
    for (const auto& k : keys) ++counts[k];
    std::vector<std::uint64_t> c;
    for (const auto& [k, n] : counts) c.push_back(n);
    return grassberger ? grassberger_reference(c) : plugin_reference(c);
}

}  // namespace testutil
