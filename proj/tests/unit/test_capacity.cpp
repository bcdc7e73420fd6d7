#include "random_models.hpp"

#include "memlens/capacity.hpp"
#include "memlens/error.hpp"
#include "memlens/synth.hpp"

#include <doctest.h>

#include <numbers>
#include <stdexcept>

using namespace memlens;

namespace {

SymbolTable table(std::initializer_list<const char*> tokens) {
    SymbolTable t;
    for (auto s : tokens) t.intern(s);
    return t;
}

StepRecord step(std::uint32_t x, std::uint32_t a, std::uint32_t r = 0) {
    return StepRecord{Symbol{x}, Symbol{a}, Symbol{r}};
}

// A_3 is Bernoulli with a different parameter for each (X_1, X_2).
JointPolicyModel four_histories() {
    const double q[2][2] = {{0.1, 0.3}, {0.6, 0.9}};
    std::vector<WeightedEpisode> eps;
    for (std::uint32_t x1 = 0; x1 < 2; ++x1)
        for (std::uint32_t x2 = 0; x2 < 2; ++x2)
            for (std::uint32_t x3 = 0; x3 < 2; ++x3)
                for (std::uint32_t a3 = 0; a3 < 2; ++a3)
                    eps.push_back({{step(x1, 0), step(x2, 0), step(x3, a3)},
                                   0.125 * (a3 ? q[x1][x2] : 1 - q[x1][x2])});
    return JointPolicyModel(3, table({"0", "1"}), table({"0", "1"}), table({"0"}), eps);
}

JointPolicyModel env(EnvKind kind, std::size_t H, double noise = 0.0, std::size_t n = 2) {
    return to_joint_model(EnvSpec{kind, H, noise, n, n, false, 0});
}

}  // namespace

TEST_CASE("joint model validation") {
    const auto x = table({"0", "1"});
    const auto a = table({"0"});
    const auto r = table({"0"});
    CHECK_THROWS_AS(JointPolicyModel(1, x, a, r, {{{step(0, 0)}, 0.5}, {{step(1, 0)}, 0.4}}), InputError);
    CHECK_THROWS_AS(JointPolicyModel(2, x, a, r, {{{step(0, 0)}, 1.0}}), InputError);
    CHECK_THROWS_AS(JointPolicyModel(1, x, a, r, {{{step(0, 0)}, 1.5}, {{step(1, 0)}, -0.5}}), InputError);
    CHECK_THROWS_AS(JointPolicyModel(1, x, a, r, {{{step(2, 0)}, 1.0}}), InputError);

    const JointPolicyModel merged(1, x, a, r, {{{step(0, 0)}, 0.25}, {{step(1, 0)}, 0.0}, {{step(0, 0)}, 0.75}});
    REQUIRE(merged.episodes().size() == 1);
    CHECK(merged.episodes()[0].p == 1.0);
}

TEST_CASE("joint model JSON") {
    const auto jm = env(EnvKind::noisy_copy, 3, 0.25);
    const auto again = parse_joint_model(format_joint_model(jm));
    CHECK(again.horizon() == 3);
    REQUIRE(again.episodes().size() == jm.episodes().size());
    for (std::size_t i = 0; i < jm.episodes().size(); ++i) {
        CHECK(again.episodes()[i].z == jm.episodes()[i].z);
        CHECK(again.episodes()[i].p == jm.episodes()[i].p);
    }
    CHECK_THROWS_AS(parse_joint_model(R"({"horizon": 1, "alphabet": {"x": [0, 0], "a": [0], "r": [0]},
                                          "episodes": [{"z": [[0, 0, 0]], "p": 1}]})"),
                    InputError);
    CHECK_THROWS_AS(parse_joint_model(R"({"horizon": 1, "alphabet": {"x": [0], "a": [0], "r": [0]},
                                          "episodes": [{"z": [[0, 0, 0]], "p": 0.9}]})"),
                    InputError);
    const auto ok = parse_joint_model(R"({"horizon": 1, "alphabet": {"x": ["u"], "a": [0, 1], "r": [0]},
                                          "episodes": [{"z": [["u", 0, 0]], "p": 0.5}, {"z": [["u", 1, 0]], "p": 0.5}]})");
    CHECK(ok.n_z() == 2);
}

TEST_CASE("memory function checks") {
    const auto markov = env(EnvKind::markov, 3, 0.3);
    CHECK(is_memory_function_for(MemoryFunction(3, markov.n_z(), 1), markov));

    const auto parity = env(EnvKind::parity, 3);
    MemoryFunction track(3, parity.n_z(), 2);
    for (std::size_t t = 1; t <= 3; ++t)
        for (std::uint32_t z = 0; z < 4; ++z)
            for (std::uint32_t y = 0; y < 2; ++y) track.set(t, z, y, y ^ (z / 2));
    CHECK(is_memory_function_for(track, parity));
    CHECK_FALSE(is_memory_function_for(MemoryFunction(3, parity.n_z(), 1), parity));

    MemoryFunction forget(3, parity.n_z(), 2);
    CHECK_FALSE(is_memory_function_for(forget, parity));
    CHECK_THROWS_AS(is_memory_function_for(MemoryFunction(2, 4, 1), parity), std::invalid_argument);
}

TEST_CASE("capacity examples") {
    CHECK(capacity(env(EnvKind::markov, 3, 0.2)).capacity == 1u);
    const auto parity = env(EnvKind::parity, 3);
    const auto rp = capacity(parity);
    CHECK(rp.capacity == 2u);
    REQUIRE(rp.witness.has_value());
    CHECK(is_memory_function_for(*rp.witness, parity));

    const auto four = four_histories();
    const auto r3 = capacity(four, CapacityOptions{3});
    CHECK_FALSE(r3.capacity.has_value());
    CHECK_FALSE(r3.witness.has_value());
    const auto r4 = capacity(four, CapacityOptions{4});
    CHECK(r4.capacity == 4u);
    CHECK(is_memory_function_for(*r4.witness, four));
}

TEST_CASE("delayed cue needs one state per cue value") {
    for (std::size_t m = 2; m <= 3; ++m) {
        CAPTURE(m);
        const auto jm = env(EnvKind::delayed_cue, 3, 0.0, m);
        const auto r = capacity(jm, CapacityOptions{3});
        CHECK(r.capacity == m);
        CHECK(is_memory_function_for(*r.witness, jm));
    }
}

TEST_CASE("budget exhaustion") {
    CapacityOptions tiny;
    tiny.k_max = 4;
    tiny.node_budget = 10;
    CHECK_THROWS_AS(capacity(four_histories(), tiny), BudgetError);
    CHECK_THROWS_AS(capacity(four_histories(), CapacityOptions{0}), std::invalid_argument);
}

TEST_CASE("search agrees with brute-force enumeration") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t H = 2 + rep % 2;
        const auto jm = testutil::random_controller_model(rng, H, 1 + rep % 3);
        const std::size_t k_max = H == 2 ? 4 : 2;
        CAPTURE(rep);
        const auto searched = capacity(jm, CapacityOptions{k_max});
        CHECK(searched.capacity == testutil::brute_force_capacity(jm, k_max));
        if (searched.witness) CHECK(is_memory_function_for(*searched.witness, jm));
    }
}

TEST_CASE("exact information examples") {
    const auto markov = env(EnvKind::markov, 3, 0.3);
    for (std::size_t t = 2; t <= 3; ++t)
        for (std::size_t i = 1; i < t; ++i) CHECK(std::abs(exact_cmi(markov, t, i)) < 1e-12);

    const auto parity = env(EnvKind::parity, 3);
    CHECK(std::abs(exact_cmi(parity, 3, 1) + exact_cmi(parity, 3, 2) - std::numbers::ln2) < 1e-12);

    const EventPredicate everything = [](std::span<const StepRecord>, Symbol) { return true; };
    const EventPredicate nothing = [](std::span<const StepRecord>, Symbol) { return false; };
    CHECK(exact_cmi(parity, 3, 1, everything) == exact_cmi(parity, 3, 1));
    CHECK_THROWS_AS(exact_cmi(parity, 3, 1, nothing), NoSamplesError);
    CHECK_THROWS_AS(exact_cmi(parity, 3, 3), std::invalid_argument);
    CHECK_THROWS_AS(exact_cmi(parity, 4, 1), std::invalid_argument);
    CHECK(event_probability(parity, 2, nothing) == 0.0);
}

TEST_CASE("exact chain rule") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const auto jm = testutil::random_controller_model(rng, 3, 1 + rep % 3);
        const auto ev = testutil::random_event(rep);
        for (std::size_t t = 2; t <= 3; ++t) {
            double sum = 0.0;
            for (std::size_t i = 1; i < t; ++i) sum += exact_cmi(jm, t, i);
            CHECK(std::abs(sum - exact_history_information(jm, t, t - 1)) < 1e-12);
            if (event_probability(jm, t, ev) > 0) {
                double restricted = 0.0;
                for (std::size_t i = 1; i < t; ++i) restricted += exact_cmi(jm, t, i, ev);
                CHECK(std::abs(restricted - exact_history_information(jm, t, t - 1, ev)) < 1e-12);
            }
        }
    }
}

TEST_CASE("bound examples") {
    const auto markov = verify_lower_bound(env(EnvKind::markov, 3, 0.1));
    CHECK(markov.determined);
    CHECK(markov.log_capacity == 0.0);
    for (const auto& c : markov.checks) {
        CHECK(std::abs(c.memory_sum) < 1e-12);
        CHECK(c.holds);
    }

    const auto parity = verify_lower_bound(env(EnvKind::parity, 3));
    CHECK(parity.all_hold);
    REQUIRE(parity.checks.size() == 3);
    CHECK(std::abs(parity.checks[2].memory_sum - std::numbers::ln2) < 1e-12);
    CHECK(std::abs(parity.checks[2].gap) < 1e-12);

    const auto noisy = verify_lower_bound(env(EnvKind::noisy_copy, 2, 0.1));
    CHECK(*noisy.capacity.capacity == 2);
    CHECK(noisy.all_hold);
    CHECK(noisy.checks[1].memory_sum < std::numbers::ln2 - 0.1);
    CHECK(noisy.checks[1].memory_sum > 0.0);

    const auto four = verify_lower_bound(four_histories(), CapacityOptions{3});
    CHECK_FALSE(four.determined);
    CHECK(four.checks.empty());
}

TEST_CASE("bounds hold on random controllers and events") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        const auto jm = testutil::random_controller_model(rng, 2 + rep % 2, 1 + rep % 3);
        std::vector<NamedEvent> events;
        for (int k = 0; k < 5; ++k) events.push_back({"e" + std::to_string(k), testutil::random_event(rep * 10 + k)});
        const auto report = verify_lower_bound(jm, CapacityOptions{3}, events);
        REQUIRE(report.determined);
        CHECK(report.all_hold);
    }
}
