#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace memlens {

/// Interned discrete token. Only meaningful together with the table that issued it.
struct Symbol {
    std::uint32_t id = 0;

    friend bool operator==(Symbol, Symbol) = default;
    friend auto operator<=>(Symbol, Symbol) = default;
};

/// Insertion-ordered bijection between raw string tokens and dense ids.
class SymbolTable {
public:
    SymbolTable() = default;

    Symbol intern(std::string_view token) {
        auto it = lookup_.find(std::string(token));
        if (it != lookup_.end()) return Symbol{it->second};
        const auto id = static_cast<std::uint32_t>(entries_.size());
        entries_.emplace_back(token);
        lookup_.emplace(entries_.back(), id);
        return Symbol{id};
    }

    /// Returns false and leaves `out` untouched when the token was never interned.
    bool find(std::string_view token, Symbol& out) const {
        auto it = lookup_.find(std::string(token));
        if (it == lookup_.end()) return false;
        out = Symbol{it->second};
        return true;
    }

    const std::string& token(Symbol s) const { return entries_.at(s.id); }
    std::size_t size() const noexcept { return entries_.size(); }
    bool contains(Symbol s) const noexcept { return s.id < entries_.size(); }
    const std::vector<std::string>& entries() const noexcept { return entries_; }

private:
    std::vector<std::string> entries_;
    std::unordered_map<std::string, std::uint32_t> lookup_;
};

}  // namespace memlens
