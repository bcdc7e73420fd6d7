#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace memlens {

/// True when `s` is the canonical decimal spelling of a 64-bit integer.
inline bool is_canonical_integer(std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size() || s.size() - i > 18) return false;
    if (s[i] == '0') return s.size() == i + 1 && i == 0;
    for (; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

/// Discrete token from a JSON scalar: strings as-is, integers (including
/// integral floats) canonically stringified. Returns false otherwise.
template <typename Json>
bool token_from_json(const Json& v, std::string& out) {
    if (v.is_string()) {
        out = v.template get<std::string>();
        return true;
    }
    if (v.is_number_unsigned()) {
        out = std::to_string(v.template get<std::uint64_t>());
        return true;
    }
    if (v.is_number_integer()) {
        out = std::to_string(v.template get<std::int64_t>());
        return true;
    }
    if (v.is_number_float()) {
        const double d = v.template get<double>();
        if (!std::isfinite(d) || std::floor(d) != d || std::fabs(d) > 9.0e15) return false;
        out = std::to_string(static_cast<std::int64_t>(d));
        return true;
    }
    return false;
}

template <typename Json>
Json token_to_json(const std::string& token) {
    if (is_canonical_integer(token)) return Json(std::stoll(token));
    return Json(token);
}

}  // namespace memlens
