#include "memlens/filter.hpp"

#include "memlens/error.hpp"

#include <optional>
#include <regex>

namespace memlens {

namespace {

std::vector<std::string_view> split_conjunction(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = text.find("&&", pos);
        parts.push_back(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 2;
    }
    return parts;
}

}  // namespace

Filter parse_filter(std::string_view text) {
    static const std::regex clause_re(
        R"re(^\s*([xar])\s*\[\s*t\s*(?:-\s*(\d+)\s*)?\]\s*==\s*(?:"([^"]*)"|([^\s"]+))\s*$)re");
    Filter filter;
    for (auto part : split_conjunction(text)) {
        const std::string clause(part);
        std::smatch m;
        if (!std::regex_match(clause, m, clause_re))
            throw InputError("bad filter clause '" + clause +
                             "'; expected <x|a|r>[t-<k>] == <token> or x[t] == <token>");
        FilterClause c;
        c.field = m[1].str()[0];
        c.back = m[2].matched ? std::stoul(m[2].str()) : 0;
        c.token = m[3].matched ? m[3].str() : m[4].str();
        if (m[2].matched && c.back == 0)
            throw InputError("filter offset must be t-<k> with k >= 1 in '" + clause + "'");
        if (c.back == 0 && c.field != 'x')
            throw InputError(std::string("filter may not reference ") + c.field +
                             "[t]: the event must be decidable before the action at t");
        filter.clauses.push_back(std::move(c));
    }
    return filter;
}

EventPredicate compile_filter(const Filter& filter, const SymbolTable& x_table,
                              const SymbolTable& a_table, const SymbolTable& r_table) {
    struct Bound {
        char field;
        std::size_t back;
        std::optional<Symbol> symbol;
    };
    std::vector<Bound> bound;
    for (const auto& c : filter.clauses) {
        const auto& table = c.field == 'x' ? x_table : c.field == 'a' ? a_table : r_table;
        Symbol s;
        bound.push_back(Bound{c.field, c.back, table.find(c.token, s) ? std::optional(s) : std::nullopt});
    }
    return [bound = std::move(bound)](std::span<const StepRecord> prefix, Symbol x_now) {
        for (const auto& b : bound) {
            if (!b.symbol) return false;
            if (b.back == 0) {
                if (x_now != *b.symbol) return false;
                continue;
            }
            if (b.back > prefix.size()) return false;
            const auto& z = prefix[prefix.size() - b.back];
            const Symbol v = b.field == 'x' ? z.x : b.field == 'a' ? z.a : z.r;
            if (v != *b.symbol) return false;
        }
        return true;
    };
}

}  // namespace memlens
