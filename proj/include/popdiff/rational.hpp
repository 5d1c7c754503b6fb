#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace popdiff {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

/// Exact value of a double (every finite double is a dyadic rational).
inline Rational rational_from_double(double x) { return Rational(x); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// "num/den" with a positive denominator; integers keep the "/1".
inline std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

/// Parses "num/den" or an integer literal.
Rational parse_rational(const std::string& text);

inline Rational rational_pow(const Rational& base, unsigned exp) {
  Rational r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace popdiff
