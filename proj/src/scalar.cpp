#include "negdep/scalar.hpp"

#include <cmath>
#include <stdexcept>

namespace negdep {

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot represent a non-finite value exactly");
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  // mant * 2^53 is an integer for every double.
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(scaled);
  exp -= 53;
  Rational two_pow = 1;
  for (int i = 0; i < std::abs(exp); ++i) two_pow *= 2;
  return exp >= 0 ? Rational(r * two_pow) : Rational(r / two_pow);
}

Rational parse_rational(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    Rational num(std::string(s.substr(0, slash)));
    Rational den(std::string(s.substr(slash + 1)));
    if (den == 0) throw std::invalid_argument("zero denominator in rational literal");
    return num / den;
  }
  const auto dot = s.find('.');
  if (dot == std::string_view::npos) return Rational(std::string(s));
  std::string digits(s.substr(0, dot));
  std::string frac(s.substr(dot + 1));
  Rational den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  bool negative = !digits.empty() && digits[0] == '-';
  std::string all = digits + frac;
  if (all.empty() || all == "-") throw std::invalid_argument("malformed decimal literal");
  Rational value(all);
  if (negative && digits == "-") value = -Rational(frac);
  return value / den;
}

std::string to_string(const Rational& x) { return x.str(); }

}  // namespace negdep
