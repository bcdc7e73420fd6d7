#include "memlens/cli.hpp"

#include "memlens/capacity.hpp"
#include "memlens/error.hpp"
#include "memlens/filter.hpp"
#include "memlens/parallel.hpp"
#include "memlens/report.hpp"
#include "memlens/significance.hpp"
#include "memlens/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace memlens {

namespace {

namespace fs = std::filesystem;

struct AnalyzeArgs {
    std::string input;
    std::string output_csv;
    std::string output_svg;
    std::size_t max_lag = 3;
    std::string estimator = "grassberger";
    std::size_t permutations = 100;
    double level = 0.95;
    std::uint64_t seed = 0;
    std::optional<std::size_t> min_t;
    std::string filter;
};

struct SynthArgs {
    std::string env;
    std::size_t episodes = 100;
    std::size_t horizon = 5;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_obs = 2;
    std::size_t n_actions = 2;
    bool reward_cue = false;
    std::string output;
    std::string joint_model;
};

struct CapacityArgs {
    std::string input;
    std::size_t k_max = 3;
    std::uint64_t budget = CapacityOptions{}.node_budget;
    std::string filter;
};

struct DiscretizeArgs {
    std::string input;
    std::string output;
    long long bins = 0;
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path + "'");
    f << text;
}

std::vector<fs::path> analysis_inputs(const std::string& input) {
    const fs::path p(input);
    if (!fs::exists(p)) throw InputError("input '" + input + "' does not exist");
    if (!fs::is_directory(p)) return {p};
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw InputError("directory '" + input + "' contains no .jsonl files");
    return files;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
    const auto estimator = parse_estimator(args.estimator);
    if (!estimator) throw InputError("unknown estimator '" + args.estimator + "' (grassberger|plugin)");
    if (args.min_t && *args.min_t < args.max_lag + 1)
        throw InputError("--min-t must be at least --max-lag + 1");
    std::optional<Filter> filter;
    if (!args.filter.empty()) filter = parse_filter(args.filter);

    PermutationOptions perm;
    perm.reps = args.permutations;
    perm.level = args.level;
    perm.seed = args.seed;
    perm.threads = worker_count();
    if (perm.reps < 20) throw InputError("--permutations must be at least 20");
    if (!(perm.level > 0.0 && perm.level < 1.0)) throw InputError("--level must lie in (0, 1)");

    const auto inputs = analysis_inputs(args.input);
    const bool batch = fs::is_directory(args.input);
    std::vector<LabeledProfile> profiles;
    for (const auto& path : inputs) {
        const auto ds = load_dataset(path);
        ProfileOptions opts;
        opts.max_lag = args.max_lag;
        opts.estimator = *estimator;
        opts.min_t = args.min_t;
        if (filter) opts.event = compile_filter(*filter, ds.x_table(), ds.a_table(), ds.r_table());
        try {
            profiles.push_back(LabeledProfile{path.stem().string(), analyze_memory(ds, opts, perm)});
        } catch (const NoSamplesError& e) {
            throw NoSamplesError(path.string() + ": " + e.what());
        }
    }
    write_text(args.output_csv, format_csv(profiles, batch), out);
    if (!args.output_svg.empty()) write_text(args.output_svg, render_svg(profiles), out);
    return kExitOk;
}

int cmd_synth(const SynthArgs& args, std::ostream& out) {
    const auto kind = parse_env_kind(args.env);
    if (!kind)
        throw InputError("unknown environment '" + args.env + "'; valid kinds: " +
                         std::string(env_kind_names()));
    EnvSpec spec;
    spec.kind = *kind;
    spec.horizon = args.horizon;
    spec.noise = args.noise;
    spec.seed = args.seed;
    spec.n_obs = args.n_obs;
    spec.n_actions = args.n_actions;
    spec.reward_cue = args.reward_cue;
    const auto ds = generate(spec, args.episodes, worker_count());
    write_text(args.output, format_dataset(ds), out);
    if (!args.joint_model.empty()) write_text(args.joint_model, format_joint_model(to_joint_model(spec)), out);
    return kExitOk;
}

int cmd_capacity(const CapacityArgs& args, std::ostream& out) {
    const auto model = load_joint_model(args.input);
    CapacityOptions opts;
    opts.k_max = args.k_max;
    opts.node_budget = args.budget;
    if (opts.k_max < 1) throw InputError("--k-max must be at least 1");
    std::vector<NamedEvent> events;
    if (!args.filter.empty())
        events.push_back(NamedEvent{args.filter, compile_filter(parse_filter(args.filter), model.x_table(),
                                                                model.a_table(), model.r_table())});
    const auto report = verify_lower_bound(model, opts, events);

    out << "horizon: " << model.horizon() << "\n";
    out << "search_nodes: " << report.capacity.nodes << "\n";
    if (!report.determined) {
        out << "capacity: >" << opts.k_max << " (no memory function with K <= " << opts.k_max << ")\n";
        out << "bound: undetermined\n";
        return kExitOk;
    }
    out << "capacity: " << *report.capacity.capacity << "\n";
    out << "log_capacity_nats: " << format_real(report.log_capacity) << "\n";
    out << "t,event,event_probability,memory_sum_nats,log_capacity_nats,gap_nats,holds,tight\n";
    for (const auto& c : report.checks) {
        const bool tight = std::abs(c.gap) <= 1e-9;
        out << c.t << "," << c.event << "," << format_real(c.event_probability) << ","
            << format_real(c.memory_sum) << "," << format_real(c.log_capacity) << ","
            << format_real(c.gap) << "," << (c.holds ? "true" : "false") << ","
            << (tight ? "true" : "false") << "\n";
    }
    out << "bound: " << (report.all_hold ? "holds" : "VIOLATED") << "\n";
    return kExitOk;
}

int cmd_discretize(const DiscretizeArgs& args, std::ostream& out) {
    if (args.bins < 1) throw InputError("--bins must be at least 1");
    const auto summary = discretize_rewards(args.input, args.output, static_cast<std::size_t>(args.bins));
    out << "rewards: " << summary.n_rewards << "\n";
    out << "occupied_bins: " << summary.occupied_bins << " of " << summary.bins << "\n";
    out << "bin,upper_edge,count\n";
    for (std::size_t b = 0; b < summary.bins; ++b) {
        out << "q" << b << ",";
        if (b < summary.boundaries.size()) out << format_real(summary.boundaries[b]);
        out << "," << summary.counts[b] << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"memlens: estimate how much past information a policy uses per action"};
    app.name("memlens");
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* a = app.add_subcommand("analyze", "estimate the memory profile M_0..M_k of trajectory logs");
    a->add_option("--input", analyze.input, "trajectory JSONL file or a directory of them")->required();
    a->add_option("--output-csv", analyze.output_csv, "CSV report path (default: stdout)");
    a->add_option("--output-svg", analyze.output_svg, "SVG bar chart path");
    a->add_option("--max-lag", analyze.max_lag, "largest history lag k")->capture_default_str();
    a->add_option("--estimator", analyze.estimator, "grassberger|plugin")->capture_default_str();
    a->add_option("--permutations", analyze.permutations, "resampling replicates")->capture_default_str();
    a->add_option("--level", analyze.level, "significance level")->capture_default_str();
    a->add_option("--seed", analyze.seed, "base seed")->capture_default_str();
    a->add_option("--min-t", analyze.min_t, "first time step used (default: max-lag + 1)");
    a->add_option("--filter", analyze.filter, "event, e.g. 'x[t-1] == 3 && x[t] == 0'");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "sample trajectories from a toy policy");
    s->add_option("--env", synth.env, "markov|parity|delayed_cue|noisy_copy")->required();
    s->add_option("--episodes", synth.episodes)->capture_default_str();
    s->add_option("--horizon", synth.horizon)->capture_default_str();
    s->add_option("--noise", synth.noise, "probability of a uniform action")->capture_default_str();
    s->add_option("--seed", synth.seed)->capture_default_str();
    s->add_option("--n-obs", synth.n_obs, "observation (cue) alphabet size")->capture_default_str();
    s->add_option("--n-actions", synth.n_actions, "action alphabet size")->capture_default_str();
    s->add_flag("--reward-cue", synth.reward_cue, "carry the cue in the reward instead of X");
    s->add_option("--output", synth.output, "JSONL output path (default: stdout)");
    s->add_option("--joint-model", synth.joint_model, "also write the exact joint model JSON here");

    CapacityArgs cap;
    auto* c = app.add_subcommand("capacity", "brute-force memory capacity and lower-bound check");
    c->add_option("--input,model", cap.input, "joint policy model JSON")->required();
    c->add_option("--k-max", cap.k_max, "largest capacity searched")->capture_default_str();
    c->add_option("--budget", cap.budget, "search node budget")->capture_default_str();
    c->add_option("--filter", cap.filter, "additional event for the restricted bound");

    DiscretizeArgs disc;
    auto* d = app.add_subcommand("discretize", "quantile-bin numeric rewards");
    d->add_option("--input,input", disc.input)->required();
    d->add_option("--output,output", disc.output)->required();
    d->add_option("--bins", disc.bins)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInputError;
    }

    try {
        if (*a) return cmd_analyze(analyze, out);
        if (*s) return cmd_synth(synth, out);
        if (*c) return cmd_capacity(cap, out);
        if (*d) return cmd_discretize(disc, out);
    } catch (const NoSamplesError& e) {
        err << "memlens: " << e.what() << "\n";
        return kExitNoSamples;
    } catch (const BudgetError& e) {
        err << "memlens: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        err << "memlens: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace memlens
