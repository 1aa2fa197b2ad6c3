#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace mdlrnn {

// Exact arithmetic for grammar probabilities, network parameters and
// encoding lengths. cpp_rational keeps values in lowest terms, which the
// fraction encoder relies on.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long num, long long den = 1) {
    return Rational(BigInt(num), BigInt(den));
}

double to_double(const Rational& q);

// log2 of a positive rational, safe for values far outside double range
// (test-set probabilities reach 10^-300 and below).
double log2_rational(const Rational& q);

// Renders as "num/den" ("num" when den == 1), e.g. "-3/10".
std::string rational_to_string(const Rational& q);

// Parses "num", "num/den", or a plain decimal like "0.25" (exact).
// Throws std::runtime_error on malformed input or den == 0.
Rational parse_rational(const std::string& text);

// Nearest rational with denominator <= max_den, by continued-fraction
// convergents. Used to re-rationalize float weights after gradient
// training; deterministic for a given double.
Rational rational_from_double(double x, std::uint64_t max_den);

}  // namespace mdlrnn
