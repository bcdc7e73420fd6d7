#include "memlens/capacity.hpp"
#include "memlens/error.hpp"
#include "memlens/token.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace memlens {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

SymbolTable read_alphabet(const json& alphabet, const char* name, const std::string& source) {
    if (!alphabet.contains(name) || !alphabet[name].is_array() || alphabet[name].empty())
        throw InputError(source + ": alphabet." + name + " must be a non-empty array");
    SymbolTable table;
    for (const auto& v : alphabet[name]) {
        std::string token;
        if (!token_from_json(v, token))
            throw InputError(source + ": alphabet." + name + " entries must be strings or integers");
        const auto before = table.size();
        table.intern(token);
        if (table.size() == before)
            throw InputError(source + ": duplicate token '" + token + "' in alphabet." + name);
    }
    return table;
}

Symbol lookup(const SymbolTable& table, const json& v, const char* name, const std::string& source) {
    std::string token;
    Symbol s;
    if (!token_from_json(v, token) || !table.find(token, s))
        throw InputError(source + ": " + name + " value " + v.dump() + " is not in the alphabet");
    return s;
}

ordered_json alphabet_json(const SymbolTable& table) {
    auto out = ordered_json::array();
    for (const auto& token : table.entries()) out.push_back(token_to_json<ordered_json>(token));
    return out;
}

}  // namespace

JointPolicyModel parse_joint_model(std::string_view text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(source + ": malformed JSON (" + e.what() + ")");
    }
    if (!doc.is_object() || !doc.contains("horizon") || !doc["horizon"].is_number_unsigned())
        throw InputError(source + ": 'horizon' must be a positive integer");
    if (!doc.contains("alphabet") || !doc["alphabet"].is_object())
        throw InputError(source + ": missing 'alphabet' object");
    if (!doc.contains("episodes") || !doc["episodes"].is_array())
        throw InputError(source + ": missing 'episodes' array");

    const auto horizon = doc["horizon"].get<std::size_t>();
    auto x = read_alphabet(doc["alphabet"], "x", source);
    auto a = read_alphabet(doc["alphabet"], "a", source);
    auto r = read_alphabet(doc["alphabet"], "r", source);

    std::vector<WeightedEpisode> episodes;
    for (const auto& e : doc["episodes"]) {
        if (!e.is_object() || !e.contains("z") || !e["z"].is_array() || !e.contains("p") ||
            !e["p"].is_number())
            throw InputError(source + ": each episode needs a 'z' array and a numeric 'p'");
        WeightedEpisode we;
        we.p = e["p"].get<double>();
        for (const auto& step : e["z"]) {
            if (!step.is_array() || step.size() != 3)
                throw InputError(source + ": each step must be an [x, a, r] triple");
            we.z.push_back(StepRecord{lookup(x, step[0], "x", source), lookup(a, step[1], "a", source),
                                      lookup(r, step[2], "r", source)});
        }
        episodes.push_back(std::move(we));
    }
    try {
        return JointPolicyModel(horizon, std::move(x), std::move(a), std::move(r), std::move(episodes));
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
}

JointPolicyModel load_joint_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_joint_model(ss.str(), path.string());
}

std::string format_joint_model(const JointPolicyModel& model) {
    ordered_json doc;
    doc["horizon"] = model.horizon();
    doc["alphabet"]["x"] = alphabet_json(model.x_table());
    doc["alphabet"]["a"] = alphabet_json(model.a_table());
    doc["alphabet"]["r"] = alphabet_json(model.r_table());
    auto episodes = ordered_json::array();
    for (const auto& e : model.episodes()) {
        ordered_json entry;
        auto z = ordered_json::array();
        for (const auto& s : e.z)
            z.push_back(ordered_json::array({token_to_json<ordered_json>(model.x_table().token(s.x)),
                                             token_to_json<ordered_json>(model.a_table().token(s.a)),
                                             token_to_json<ordered_json>(model.r_table().token(s.r))}));
        entry["z"] = std::move(z);
        entry["p"] = e.p;
        episodes.push_back(std::move(entry));
    }
    doc["episodes"] = std::move(episodes);
    return doc.dump() + "\n";
}

}  // namespace memlens
