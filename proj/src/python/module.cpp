#include "memlens/capacity.hpp"
#include "memlens/cli.hpp"
#include "memlens/entropy.hpp"
#include "memlens/error.hpp"
#include "memlens/filter.hpp"
#include "memlens/infotheory.hpp"
#include "memlens/report.hpp"
#include "memlens/significance.hpp"
#include "memlens/synth.hpp"
#include "memlens/trajectory.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace memlens;

namespace {

EnvSpec make_spec(const std::string& env, std::size_t horizon, double noise, std::uint64_t seed,
                  std::size_t n_obs, std::size_t n_actions, bool reward_cue) {
    const auto kind = parse_env_kind(env);
    if (!kind) throw InputError("unknown environment '" + env + "'; valid kinds: " + std::string(env_kind_names()));
    EnvSpec spec;
    spec.kind = *kind;
    spec.horizon = horizon;
    spec.noise = noise;
    spec.seed = seed;
    spec.n_obs = n_obs;
    spec.n_actions = n_actions;
    spec.reward_cue = reward_cue;
    return spec;
}

ProfileOptions profile_options(const TrajectoryDataset& ds, std::size_t max_lag, Estimator estimator,
                               std::optional<std::size_t> min_t, const std::string& filter) {
    ProfileOptions opts;
    opts.max_lag = max_lag;
    opts.estimator = estimator;
    opts.min_t = min_t;
    if (!filter.empty())
        opts.event = compile_filter(parse_filter(filter), ds.x_table(), ds.a_table(), ds.r_table());
    return opts;
}

py::list profile_rows(const MemoryProfile& profile) {
    py::list rows;
    for (const auto& e : profile.lags) {
        py::dict row;
        row["lag"] = e.lag;
        row["estimate_nats"] = e.nats;
        row["n_samples"] = e.n_samples;
        row["n_distinct_contexts"] = e.n_distinct_contexts;
        if (e.test) {
            row["threshold_nats"] = e.test->threshold;
            row["significant"] = e.test->significant;
            row["degenerate_null"] = e.test->degenerate;
            row["replicates"] = e.test->replicates;
        }
        rows.append(row);
    }
    return rows;
}

py::list dataset_tokens(const TrajectoryDataset& ds) {
    py::list episodes;
    for (const auto& traj : ds.trajectories()) {
        py::list steps;
        for (const auto& s : traj.steps)
            steps.append(py::make_tuple(ds.x_table().token(s.x), ds.a_table().token(s.a),
                                        ds.r_table().token(s.r)));
        episodes.append(py::make_tuple(traj.id, steps));
    }
    return episodes;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Memory-use estimation for sequential decision policies";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NoSamplesError>(m, "NoSamplesError", PyExc_ValueError);
    py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

    py::enum_<Estimator>(m, "Estimator")
        .value("plugin", Estimator::plugin)
        .value("grassberger", Estimator::grassberger);

    m.def("digamma", &digamma, py::arg("x"));
    m.def("grassberger_G", &grassberger_G, py::arg("n"));
    m.def(
        "entropy_of_counts",
        [](const std::vector<std::uint64_t>& counts, Estimator estimator) {
            return entropy_of_counts(counts, estimator);
        },
        py::arg("counts"), py::arg("estimator") = Estimator::grassberger);

    py::class_<TrajectoryDataset>(m, "TrajectoryDataset")
        .def_property_readonly("n_episodes", &TrajectoryDataset::size)
        .def_property_readonly("total_steps", &TrajectoryDataset::total_steps)
        .def("episodes", &dataset_tokens, "List of (id, [(x, a, r), ...]) token tuples")
        .def("to_jsonl", &format_dataset)
        .def("__len__", &TrajectoryDataset::size);

    m.def("load_dataset", &load_dataset, py::arg("path"));
    m.def("parse_dataset", [](const std::string& text) { return parse_dataset(text); }, py::arg("text"));
    m.def(
        "count_samples",
        [](const TrajectoryDataset& ds, std::size_t lag, std::size_t min_t) {
            return extract_samples(ds, lag, min_t).size();
        },
        py::arg("dataset"), py::arg("lag"), py::arg("min_t"));

    m.def(
        "memory_profile",
        [](const TrajectoryDataset& ds, std::size_t max_lag, Estimator estimator,
           std::optional<std::size_t> min_t, const std::string& filter) {
            return profile_rows(memory_profile(ds, profile_options(ds, max_lag, estimator, min_t, filter)));
        },
        py::arg("dataset"), py::arg("max_lag") = 3, py::arg("estimator") = Estimator::grassberger,
        py::arg("min_t") = py::none(), py::arg("filter") = "");

    m.def(
        "analyze",
        [](const TrajectoryDataset& ds, std::size_t max_lag, Estimator estimator, std::size_t permutations,
           double level, std::uint64_t seed, std::optional<std::size_t> min_t, const std::string& filter) {
            PermutationOptions perm{permutations, level, seed, 0};
            MemoryProfile profile;
            {
                py::gil_scoped_release release;
                profile = analyze_memory(ds, profile_options(ds, max_lag, estimator, min_t, filter), perm);
            }
            return profile_rows(profile);
        },
        py::arg("dataset"), py::arg("max_lag") = 3, py::arg("estimator") = Estimator::grassberger,
        py::arg("permutations") = 100, py::arg("level") = 0.95, py::arg("seed") = 0,
        py::arg("min_t") = py::none(), py::arg("filter") = "");

    m.def(
        "generate",
        [](const std::string& env, std::size_t episodes, std::size_t horizon, double noise, std::uint64_t seed,
           std::size_t n_obs, std::size_t n_actions, bool reward_cue) {
            return generate(make_spec(env, horizon, noise, seed, n_obs, n_actions, reward_cue), episodes);
        },
        py::arg("env"), py::arg("episodes"), py::arg("horizon") = 5, py::arg("noise") = 0.0,
        py::arg("seed") = 0, py::arg("n_obs") = 2, py::arg("n_actions") = 2, py::arg("reward_cue") = false);

    py::class_<JointPolicyModel>(m, "JointPolicyModel")
        .def_property_readonly("horizon", &JointPolicyModel::horizon)
        .def_property_readonly("n_episodes", [](const JointPolicyModel& jm) { return jm.episodes().size(); })
        .def("to_json", &format_joint_model);

    m.def(
        "joint_model",
        [](const std::string& env, std::size_t horizon, double noise, std::size_t n_obs, std::size_t n_actions,
           bool reward_cue) {
            return to_joint_model(make_spec(env, horizon, noise, 0, n_obs, n_actions, reward_cue));
        },
        py::arg("env"), py::arg("horizon") = 3, py::arg("noise") = 0.0, py::arg("n_obs") = 2,
        py::arg("n_actions") = 2, py::arg("reward_cue") = false);
    m.def("load_joint_model", &load_joint_model, py::arg("path"));
    m.def("parse_joint_model", [](const std::string& text) { return parse_joint_model(text); }, py::arg("text"));

    m.def(
        "capacity",
        [](const JointPolicyModel& jm, std::size_t k_max) -> std::optional<std::size_t> {
            return capacity(jm, CapacityOptions{k_max}).capacity;
        },
        py::arg("model"), py::arg("k_max") = 3, "Smallest memory capacity, or None if above k_max");
    m.def(
        "exact_cmi",
        [](const JointPolicyModel& jm, std::size_t t, std::size_t i) { return exact_cmi(jm, t, i); },
        py::arg("model"), py::arg("t"), py::arg("i"));
    m.def(
        "verify_lower_bound",
        [](const JointPolicyModel& jm, std::size_t k_max) {
            const auto r = verify_lower_bound(jm, CapacityOptions{k_max});
            py::dict out;
            out["capacity"] = r.capacity.capacity;
            out["determined"] = r.determined;
            out["log_capacity"] = r.log_capacity;
            out["all_hold"] = r.all_hold;
            py::list checks;
            for (const auto& c : r.checks) {
                py::dict d;
                d["t"] = c.t;
                d["memory_sum"] = c.memory_sum;
                d["gap"] = c.gap;
                d["holds"] = c.holds;
                checks.append(d);
            }
            out["checks"] = checks;
            return out;
        },
        py::arg("model"), py::arg("k_max") = 3);

    m.def(
        "discretize_rewards",
        [](const std::filesystem::path& in, const std::filesystem::path& out, std::size_t bins) {
            const auto s = discretize_rewards(in, out, bins);
            py::dict d;
            d["boundaries"] = s.boundaries;
            d["counts"] = s.counts;
            d["occupied_bins"] = s.occupied_bins;
            return d;
        },
        py::arg("input"), py::arg("output"), py::arg("bins"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"memlens"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the memlens command line in-process; returns (exit_code, stdout, stderr)");
}
