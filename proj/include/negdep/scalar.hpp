#pragma once

// Arithmetic backends. Every probability-valued recursion is written once as a
// template over Scalar and instantiated for double and for exact rationals.

#include <boost/multiprecision/gmp.hpp>

#include <concepts>
#include <string>
#include <string_view>
#include <type_traits>

namespace negdep {

using Rational = boost::multiprecision::mpq_rational;

template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
Rational exact_rational(double x);

/// Parses "a/b", an integer, or a decimal literal ("0.25" -> 1/4) exactly.
Rational parse_rational(std::string_view s);

std::string to_string(const Rational& x);

template <Scalar T>
T scalar_from_double(double x) {
  if constexpr (is_exact_v<T>) {
    return exact_rational(x);
  } else {
    return x;
  }
}

template <Scalar T>
T abs_value(const T& x) {
  return x < T(0) ? T(-x) : x;
}

}  // namespace negdep
