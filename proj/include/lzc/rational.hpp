#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace lzc {

// Exact rational arithmetic is used end-to-end: annotation constants,
// cost models, constraint coefficients and LP solutions. No floats.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string rat_str(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += "/";
        s += denominator(r).str();
    }
    return s;
}

// Accepts "N" and "N/D" (optionally signed). Returns nullopt on junk.
std::optional<Rat> parse_rat(const std::string& s);

} // namespace lzc
