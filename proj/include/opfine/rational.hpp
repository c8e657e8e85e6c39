#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "opfine/errors.hpp"

namespace opfine {

/// Exact arbitrary-precision rational. All probabilities and constraint
/// coefficients in this library are values of this type; no operation
/// anywhere introduces rounding.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline Rat rat(long long num, long long den = 1) { return Rat(num, den); }

/// Canonical text form "p/q" with q >= 1 (the denominator is always written,
/// so "1/2", "0/1", "3/1").
inline std::string rat_to_string(const Rat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

/// Accepts "p/q" or a bare integer "p".
inline Rat parse_rat(const std::string& text) {
    auto is_int = [](const std::string& s) {
        std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (s.size() == start) return false;
        for (std::size_t i = start; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    auto slash = text.find('/');
    try {
        std::string num_s = slash == std::string::npos ? text : text.substr(0, slash);
        if (!is_int(num_s)) throw ParseError("not an integer: '" + num_s + "'");
        if (slash == std::string::npos) return Rat(Int(text));
        std::string den_s = text.substr(slash + 1);
        if (!is_int(den_s)) throw ParseError("not an integer: '" + den_s + "'");
        Int num(num_s);
        Int den(den_s);
        if (den <= 0) throw ParseError("rational with non-positive denominator: " + text);
        return Rat(num, den);
    } catch (const std::exception& e) {
        throw ParseError("bad rational '" + text + "': " + e.what());
    }
}

inline bool in_unit_interval(const Rat& r) { return r >= 0 && r <= 1; }

}  // namespace opfine
