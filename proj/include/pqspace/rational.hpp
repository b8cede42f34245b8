#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdio>
#include <string>
#include <string_view>

#include "pqspace/error.hpp"

namespace pqspace {

// Exact scalar for the rational computation mode. Distances and measures in
// this mode are arbitrary-precision ratios, so strict "<" comparisons at
// boundary values (the two-point family at eps = 1, cube steps at k/n) are
// decided exactly.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Scalar-dependent defaults: floating-point inputs get absolute tolerances,
// rational inputs are checked exactly.
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static double default_tolerance() { return 1e-9; }
    static constexpr bool exact = false;
};

template <>
struct scalar_traits<Rational> {
    static Rational default_tolerance() { return Rational(0); }
    static constexpr bool exact = true;
};

// Parses a decimal or ratio literal ("0.05", "-3", "2/3", "1e-2") into an
// exact rational. Used wherever a text grid or fixture value must round-trip
// without binary-float contamination.
Rational parse_rational(std::string_view text);

// "p/q" when the denominator is not 1, plain integer otherwise.
std::string format_rational(const Rational& value);

// %.17g rendering used for every float that lands in a CSV or space file.
inline std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

inline std::string format_scalar(double value) { return format_double(value); }
inline std::string format_scalar(const Rational& value) { return format_rational(value); }

} // namespace pqspace
