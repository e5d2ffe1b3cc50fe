#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>

#include "percolab/errors.hpp"

namespace percolab {

// Exact rational scalar used for all passage-time arithmetic.  Every finite
// double converts losslessly, so scalar computations are exact end to end.
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

inline Integer rat_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer rat_den(const Rational& r) { return boost::multiprecision::denominator(r); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Largest integer <= r.
inline Integer rat_floor(const Rational& r) {
    Integer q = rat_num(r) / rat_den(r);
    if (rat_num(r) < 0 && q * rat_den(r) != rat_num(r)) --q;
    return q;
}

inline Integer rat_ceil(const Rational& r) { return -rat_floor(-r); }

inline std::int64_t to_int64(const Integer& z) { return z.convert_to<std::int64_t>(); }

inline Rational rat_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational rat_min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// gcd over Q: the largest rational g with a/g, b/g integers.
inline Rational rat_gcd(const Rational& a, const Rational& b) {
    require(a > 0 && b > 0, ErrorCode::InvalidParams, "rat_gcd needs positive arguments");
    Integer n = boost::multiprecision::gcd(rat_num(a) * rat_den(b), rat_num(b) * rat_den(a));
    return Rational(n, rat_den(a) * rat_den(b));
}

inline Integer int_lcm(const Integer& a, const Integer& b) { return boost::multiprecision::lcm(a, b); }

// Nearest integer to r, ties toward +inf (matches llround for halves).
inline Integer rat_round(const Rational& r) { return rat_floor(r + Rational(1, 2)); }

inline std::string rat_string(const Rational& r) { return r.str(); }

}  // namespace percolab
