#include "memlens/error.hpp"
#include "memlens/token.hpp"
#include "memlens/trajectory.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace memlens {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string where(const std::string& source, std::size_t line) {
    return source + ":" + std::to_string(line) + ": ";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
}

/// Calls fn(line_number, text) for every non-blank line.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        auto line = text.substr(pos, end - pos);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) fn(line_no, line);
        if (end == text.size()) break;
        pos = end + 1;
    }
}

template <typename Json>
const Json& steps_of(const Json& episode, const std::string& at) {
    if (!episode.is_object()) throw InputError(at + "episode must be a JSON object");
    if (!episode.contains("steps") || !episode["steps"].is_array())
        throw InputError(at + "missing 'steps' array");
    return episode["steps"];
}

template <typename Json>
std::string episode_id(const Json& episode, std::size_t line_no) {
    if (!episode.contains("id")) return "line" + std::to_string(line_no);
    const auto& id = episode["id"];
    if (id.is_string()) return id.template get<std::string>();
    return id.dump();
}

template <typename Json>
const Json& field(const Json& step, const char* name, const std::string& at) {
    if (!step.is_object() || !step.contains(name))
        throw InputError(at + "step is missing field '" + name + "'");
    return step[name];
}

}  // namespace

TrajectoryDataset parse_dataset(std::string_view jsonl, const std::string& source) {
    DatasetBuilder builder;
    for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
        const auto at = where(source, line_no);
        ordered_json episode;
        try {
            episode = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(at + "malformed JSON (" + e.what() + ")");
        }
        const auto& steps = steps_of(episode, at);
        const auto id = episode_id(episode, line_no);
        if (steps.empty()) throw InputError(at + "empty episode '" + id + "'");
        std::vector<StepRecord> records;
        records.reserve(steps.size());
        for (const auto& step : steps) {
            std::string x, a, r;
            if (!token_from_json(field(step, "x", at), x))
                throw InputError(at + "observation 'x' must be a string or integer");
            if (!token_from_json(field(step, "a", at), a))
                throw InputError(at + "action 'a' must be a string or integer");
            if (!token_from_json(field(step, "r", at), r))
                throw InputError(at + "reward " + step["r"].dump() +
                                 " is not a discrete token; run `memlens discretize` first");
            records.push_back(builder.intern(x, a, r));
        }
        builder.add(id, std::move(records));
    });
    auto ds = std::move(builder).build();
    if (ds.size() == 0) throw InputError(source + ": no episodes (empty file)");
    return ds;
}

TrajectoryDataset load_dataset(const std::filesystem::path& path) {
    return parse_dataset(read_file(path), path.string());
}

std::string format_dataset(const TrajectoryDataset& ds) {
    std::string out;
    for (const auto& traj : ds.trajectories()) {
        ordered_json episode;
        episode["id"] = traj.id;
        auto steps = ordered_json::array();
        for (const auto& s : traj.steps) {
            ordered_json step;
            step["x"] = token_to_json<ordered_json>(ds.x_table().token(s.x));
            step["a"] = token_to_json<ordered_json>(ds.a_table().token(s.a));
            step["r"] = token_to_json<ordered_json>(ds.r_table().token(s.r));
            steps.push_back(std::move(step));
        }
        episode["steps"] = std::move(steps);
        out += episode.dump();
        out += '\n';
    }
    return out;
}

void write_dataset(const TrajectoryDataset& ds, const std::filesystem::path& path) {
    write_file(path, format_dataset(ds));
}

std::vector<double> quantile_boundaries(std::vector<double> values, std::size_t bins) {
    if (bins < 1) throw InputError("bins must be at least 1");
    if (values.empty()) throw InputError("no reward values to discretize");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::vector<double> edges;
    edges.reserve(bins - 1);
    for (std::size_t j = 1; j < bins; ++j) {
        // Smallest order statistic whose empirical CDF reaches j / bins.
        const std::size_t rank = (j * n + bins - 1) / bins;  // ceil(j n / bins)
        edges.push_back(values[std::max<std::size_t>(rank, 1) - 1]);
    }
    return edges;
}

std::size_t bin_of(double value, std::span<const double> boundaries) {
    return static_cast<std::size_t>(
        std::lower_bound(boundaries.begin(), boundaries.end(), value) - boundaries.begin());
}

DiscretizeSummary discretize_rewards(const std::filesystem::path& in,
                                     const std::filesystem::path& out, std::size_t bins) {
    if (bins < 1) throw InputError("--bins must be at least 1");
    const auto text = read_file(in);
    const auto source = in.string();

    std::vector<ordered_json> episodes;
    std::vector<double> rewards;
    std::size_t non_numeric = 0;
    std::size_t first_bad_line = 0;
    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        const auto at = where(source, line_no);
        try {
            episodes.push_back(ordered_json::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError(at + "malformed JSON (" + e.what() + ")");
        }
        const auto& steps = steps_of(episodes.back(), at);
        for (const auto& step : steps) {
            const auto& r = field(step, "r", at);
            if (r.is_number()) {
                rewards.push_back(r.template get<double>());
            } else {
                ++non_numeric;
                if (first_bad_line == 0) first_bad_line = line_no;
            }
        }
    });
    if (episodes.empty()) throw InputError(source + ": no episodes (empty file)");
    if (non_numeric > 0 && rewards.empty())
        throw InputError(source +
                         ": rewards are already discrete tokens; discretize is a no-op, "
                         "pass the file to `memlens analyze` directly");
    if (non_numeric > 0)
        throw InputError(where(source, first_bad_line) + "non-numeric reward encountered");

    DiscretizeSummary summary;
    summary.bins = bins;
    summary.n_rewards = rewards.size();
    summary.boundaries = quantile_boundaries(rewards, bins);
    summary.counts.assign(bins, 0);

    std::string result;
    for (auto& episode : episodes) {
        for (auto& step : episode["steps"]) {
            const auto b = bin_of(step["r"].template get<double>(), summary.boundaries);
            ++summary.counts[b];
            step["r"] = "q" + std::to_string(b);
        }
        result += episode.dump();
        result += '\n';
    }
    summary.occupied_bins = static_cast<std::size_t>(
        std::count_if(summary.counts.begin(), summary.counts.end(), [](auto c) { return c > 0; }));
    write_file(out, result);
    return summary;
}

}  // namespace memlens
