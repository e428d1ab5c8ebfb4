#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace lgo {

using Rational = mpq_class;

/// Parses "num/den", "num", or a decimal literal. Decimals are read exactly
/// as the binary double they denote.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" form; integers are written as "num/1".
std::string to_string(const Rational& q);

/// n/d in lowest terms; the two-argument mpq_class constructor does not reduce.
inline Rational ratio(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact value of a finite double.
inline Rational from_double(double v) { return Rational(v); }

}  // namespace lgo
