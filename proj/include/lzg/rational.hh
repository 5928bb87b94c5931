#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "lzg/bound.hh"

namespace lzg {

/// Exact rational number with 64-bit numerator and positive denominator,
/// always kept in lowest terms. Intermediate products use 128-bit integers and
/// results that do not fit raise overflow_error.
class Rational {
public:
  constexpr Rational() noexcept = default;
  constexpr Rational(std::int64_t n) noexcept : num_(n), den_(1) {} // NOLINT implicit from integers

  Rational(std::int64_t n, std::int64_t d) { *this = normalize(n, d); }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }

  constexpr bool is_integer() const noexcept { return den_ == 1; }

  /// Largest integer not greater than this value.
  std::int64_t floor() const noexcept
  {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0)
      --q;
    return q;
  }

  friend Rational operator+(Rational a, Rational b)
  {
    return normalize(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator-(Rational a, Rational b)
  {
    return normalize(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator*(Rational a, Rational b)
  {
    return normalize(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(Rational a, Rational b)
  {
    if (b.num_ == 0)
      throw std::domain_error("rational division by zero");
    return normalize(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const { return Rational(0) - *this; }
  Rational & operator+=(Rational b) { return *this = *this + b; }
  Rational & operator-=(Rational b) { return *this = *this - b; }

  friend bool operator==(Rational a, Rational b) noexcept = default;
  friend std::strong_ordering operator<=>(Rational a, Rational b) noexcept
  {
    __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs)
      return std::strong_ordering::less;
    if (lhs > rhs)
      return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string to_string() const
  {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend std::ostream & operator<<(std::ostream & os, Rational r) { return os << r.to_string(); }

private:
  static Rational normalize(__int128 n, __int128 d)
  {
    if (d == 0)
      throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    constexpr __int128 lo = std::numeric_limits<std::int64_t>::min();
    constexpr __int128 hi = std::numeric_limits<std::int64_t>::max();
    if (n < lo || n > hi || d > hi)
      throw overflow_error("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// True iff `value <| b`, i.e. `value < c` or `value <= c` (always true for infinity).
inline bool satisfies(Rational value, Bound b)
{
  if (b.is_infinity())
    return true;
  Rational c(b.value());
  return b.is_strict() ? value < c : value <= c;
}

} // namespace lzg
