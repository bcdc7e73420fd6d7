#include "helpers.hpp"

#include "memlens/error.hpp"
#include "memlens/random.hpp"
#include "memlens/significance.hpp"
#include "memlens/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

using namespace memlens;

namespace {

std::vector<LagSample> noisy_samples(std::uint64_t seed, std::size_t n, std::size_t lag) {
    std::mt19937_64 rng(seed);
    std::vector<LagSample> out(n);
    for (auto& s : out) {
        s.history.resize(lag);
        for (auto& z : s.history) z = {Symbol{std::uint32_t(rng() % 2)}, Symbol{std::uint32_t(rng() % 2)}, Symbol{0}};
        s.x_now = Symbol{std::uint32_t(rng() % 2)};
        s.a_now = Symbol{std::uint32_t(rng() % 3)};
    }
    return out;
}

}  // namespace

TEST_CASE("threshold rank") {
    CHECK(threshold_rank(100, 0.95) == 95);
    CHECK(threshold_rank(20, 0.95) == 19);
    CHECK(threshold_rank(200, 0.95) == 190);
    CHECK(threshold_rank(100, 0.999) == 100);
    CHECK(threshold_rank(100, 0.001) == 1);
}

TEST_CASE("resampling a constant column is the identity") {
    auto s = noisy_samples(1, 50, 2);
    for (auto& v : s) v.a_now = Symbol{2};
    const auto r = resample_actions(s, 77);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(r[i].a_now == s[i].a_now);
        CHECK(r[i].x_now == s[i].x_now);
        CHECK(r[i].history == s[i].history);
    }
}

TEST_CASE("resampling follows the empirical marginal") {
    std::vector<std::uint32_t> a(100000);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = i % 2;
    const auto r = resample_action_column(a, 5);
    const double zeros = static_cast<double>(std::count(r.begin(), r.end(), 0u)) / r.size();
    CHECK(zeros >= 0.49);
    CHECK(zeros <= 0.51);

    CHECK(resample_action_column(a, 5) == r);
    CHECK(resample_action_column(a, 6) != r);
    CHECK_THROWS_AS(resample_actions({}, 1), NoSamplesError);
}

TEST_CASE("replicates are recomputed from independent resamples") {
    const auto s = noisy_samples(2, 400, 1);
    PermutationOptions opts;
    opts.reps = 30;
    opts.seed = 1234;
    const auto res = permutation_test(s, Estimator::grassberger, opts);
    std::vector<double> expected;
    for (std::size_t j = 0; j < 30; ++j)
        expected.push_back(conditional_mi(resample_actions(s, replicate_seed(1234, j)), Estimator::grassberger));
    std::sort(expected.begin(), expected.end());
    REQUIRE(res.replicates.size() == 30);
    for (std::size_t j = 0; j < 30; ++j) CHECK(std::abs(res.replicates[j] - expected[j]) < 1e-12);
    CHECK(std::is_sorted(res.replicates.begin(), res.replicates.end()));
    CHECK(res.threshold == res.replicates[threshold_rank(30, 0.95) - 1]);
    CHECK(res.significant == (res.observed >= res.threshold));
    CHECK(res.observed == conditional_mi(s, Estimator::grassberger));
    CHECK(res.seed == 1234);
}

TEST_CASE("result does not depend on worker count") {
    const auto s = noisy_samples(3, 2000, 2);
    PermutationOptions one;
    one.seed = 9;
    one.threads = 1;
    PermutationOptions many = one;
    many.threads = 4;
    const auto a = permutation_test(s, Estimator::plugin, one);
    const auto b = permutation_test(s, Estimator::plugin, many);
    CHECK(a.replicates == b.replicates);
    CHECK(a.threshold == b.threshold);
    CHECK(a.significant == b.significant);
}

TEST_CASE("raising the level never creates significance") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = noisy_samples(100 + seed, 300, 1);
        bool was_significant = true;
        for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
            PermutationOptions opts;
            opts.level = level;
            opts.seed = seed;
            const auto r = permutation_test(s, Estimator::grassberger, opts);
            if (!was_significant) CHECK_FALSE(r.significant);
            was_significant = r.significant;
        }
    }
}

TEST_CASE("constant actions give a degenerate null") {
    auto s = noisy_samples(4, 200, 1);
    for (auto& v : s) v.a_now = Symbol{0};
    const auto r = permutation_test(s, Estimator::plugin, PermutationOptions{});
    CHECK(r.observed == 0.0);
    for (double v : r.replicates) CHECK(v == 0.0);
    CHECK(r.significant);
    CHECK(r.degenerate);
}

TEST_CASE("parity memory is significant") {
    const auto ds = generate(EnvSpec{EnvKind::parity, 5, 0.0, 2, 2, false, 21}, 10000);
    const auto s = extract_samples(ds, 1, 4);
    const auto r = permutation_test(s, Estimator::grassberger, PermutationOptions{});
    CHECK(r.significant);
    CHECK_FALSE(r.degenerate);
    CHECK(r.replicates.size() == 100);
    CHECK(r.threshold < 0.01);
}

TEST_CASE("invalid options") {
    const auto s = noisy_samples(5, 50, 1);
    PermutationOptions few;
    few.reps = 19;
    CHECK_THROWS_AS(permutation_test(s, Estimator::plugin, few), std::invalid_argument);
    for (double level : {0.0, 1.0, -0.5}) {
        PermutationOptions bad;
        bad.level = level;
        CHECK_THROWS_AS(permutation_test(s, Estimator::plugin, bad), std::invalid_argument);
    }
    CHECK_THROWS_AS(permutation_test(std::vector<LagSample>{}, Estimator::plugin, PermutationOptions{}),
                    NoSamplesError);
}

TEST_CASE("analyze_memory tests each lag under its own seed") {
    const auto ds = generate(EnvSpec{EnvKind::noisy_copy, 6, 0.3, 2, 2, false, 2}, 300);
    PermutationOptions perm;
    perm.seed = 55;
    perm.reps = 40;
    const auto p = analyze_memory(ds, ProfileOptions{}, perm);
    REQUIRE(p.lags.size() == 4);
    for (const auto& l : p.lags) {
        REQUIRE(l.test.has_value());
        CHECK(l.test->seed == derive_seed(55, l.lag));
        CHECK(l.test->observed == l.nats);
        const auto again = permutation_test(extract_samples(ds, l.lag, 4), Estimator::grassberger,
                                            PermutationOptions{40, 0.95, derive_seed(55, l.lag), 1});
        CHECK(again.replicates == l.test->replicates);
    }
    CHECK(p.lags[1].test->significant);
}
