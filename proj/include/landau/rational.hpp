#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "landau/errors.hpp"

namespace landau {

/// Exact fraction for exponent bookkeeping; always normalized with den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num(n), den(1) {}  // NOLINT(google-explicit-constructor)
  constexpr Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    normalize();
  }

  constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend constexpr Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend constexpr Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend constexpr Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend constexpr Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
  friend constexpr bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  friend constexpr bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
  friend constexpr bool operator<=(Rational a, Rational b) { return !(b < a); }
  friend constexpr bool operator>(Rational a, Rational b) { return b < a; }
  friend constexpr bool operator>=(Rational a, Rational b) { return !(a < b); }
  friend std::ostream& operator<<(std::ostream& os, Rational r) {
    os << r.num;
    if (r.den != 1) os << '/' << r.den;
    return os;
  }

 private:
  constexpr void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
};

/// Parses "a", "a/b" or a finite decimal such as "1.25" into an exact fraction.
inline Rational parse_rational(std::string_view s) {
  auto bad = [&] { return ParameterError("not a rational number: '" + std::string(s) + "'"); };
  auto integer = [&](std::string_view t) {
    if (t.empty()) throw bad();
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(std::string(t), &pos);
    } catch (const std::exception&) {
      throw bad();
    }
    if (pos != t.size()) throw bad();
    return static_cast<std::int64_t>(v);
  };
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const std::int64_t d = integer(s.substr(slash + 1));
    if (d == 0) throw bad();
    return {integer(s.substr(0, slash)), d};
  }
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    const std::string_view frac = s.substr(dot + 1);
    if (frac.size() > 15 || frac.find_first_not_of("0123456789") != std::string_view::npos) throw bad();
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::string_view whole = s.substr(0, dot);
    const bool neg = !whole.empty() && whole.front() == '-';
    const std::int64_t w = whole.empty() || whole == "-" ? 0 : integer(whole);
    const std::int64_t f = frac.empty() ? 0 : integer(frac);
    return {(neg ? -1 : 1) * ((neg ? -w : w) * den + f), den};
  }
  return {integer(s)};
}

}  // namespace landau
