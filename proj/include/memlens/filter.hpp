#pragma once

#include "memlens/symbol_table.hpp"
#include "memlens/trajectory.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace memlens {

/// One `field[t-k] == token` term; k == 0 only for the current observation.
struct FilterClause {
    char field = 'x';
    std::size_t back = 0;
    std::string token;
};

/// Conjunction of clauses over history and the current observation.
///
///   x[t-2] == 3 && a[t-1] == "left" && x[t] == 0
///
/// a[t] and r[t] are rejected: the event must not depend on the action being
/// explained or on anything revealed after it.
struct Filter {
    std::vector<FilterClause> clauses;
};

Filter parse_filter(std::string_view text);

/// Binds tokens to the given tables. Tokens absent from a table make their
/// clause unsatisfiable; clauses reaching before t = 1 are false.
EventPredicate compile_filter(const Filter& filter, const SymbolTable& x_table,
                              const SymbolTable& a_table, const SymbolTable& r_table);

}  // namespace memlens
