#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ccsim {

/// Exact rational, used for transmission rates so that deterministic schemes
/// can be checked with zero tolerance.
struct Rational {
  long long num{0};
  long long den{1};

  Rational() = default;
  Rational(long long n, long long d = 1) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    normalize();
  }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string to_string() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
  }
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
};

}  // namespace ccsim
