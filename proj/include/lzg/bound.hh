#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace lzg {

/// Raised when bound arithmetic leaves the supported constant range. The
/// analysis is aborted rather than letting values wrap around.
class overflow_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A difference bound `(<, c)`, `(<=, c)` or infinity.
///
/// Encoded as a single integer `2c + (weak ? 1 : 0)` so that the natural
/// integer order is the bound order: `(<, c) < (<=, c) < (<, c+1)`, and the
/// largest integer represents infinity.
class Bound {
public:
  using value_type = std::int64_t;

  /// Largest magnitude accepted for a finite constant.
  static constexpr value_type max_constant = value_type{1} << 40;

  constexpr Bound() noexcept : raw_(infinity_raw) {}

  static constexpr Bound infinity() noexcept { return Bound{}; }
  static Bound le(value_type c) { return Bound(encode(c, true)); }
  static Bound lt(value_type c) { return Bound(encode(c, false)); }
  static Bound make(value_type c, bool strict) { return strict ? lt(c) : le(c); }
  static constexpr Bound le_zero() noexcept { return Bound(1); }
  static constexpr Bound lt_zero() noexcept { return Bound(0); }

  constexpr bool is_infinity() const noexcept { return raw_ == infinity_raw; }
  constexpr bool is_strict() const noexcept { return !is_infinity() && (raw_ & 1) == 0; }
  constexpr bool is_weak() const noexcept { return !is_infinity() && (raw_ & 1) == 1; }

  /// Constant of a finite bound (arithmetic shift keeps negative values exact).
  constexpr value_type value() const noexcept { return raw_ >> 1; }

  constexpr std::int64_t raw() const noexcept { return raw_; }

  /// The complement constraint: not(y1 - y2 < c) is y2 - y1 <= -c and
  /// not(y1 - y2 <= c) is y2 - y1 < -c. Only defined for finite bounds.
  Bound negated() const
  {
    if (is_infinity())
      throw std::logic_error("cannot negate an infinite bound");
    return make(-value(), is_weak());
  }

  friend constexpr auto operator<=>(Bound a, Bound b) noexcept = default;
  friend constexpr bool operator==(Bound a, Bound b) noexcept = default;

  friend Bound operator+(Bound a, Bound b)
  {
    if (a.is_infinity() || b.is_infinity())
      return infinity();
    value_type c = 0;
    if (__builtin_add_overflow(a.value(), b.value(), &c))
      throw overflow_error("bound addition overflow");
    return Bound(encode(c, a.is_weak() && b.is_weak()));
  }

  std::string to_string() const
  {
    if (is_infinity())
      return "<inf";
    return (is_strict() ? "<" : "<=") + std::to_string(value());
  }

  friend std::ostream & operator<<(std::ostream & os, Bound b) { return os << b.to_string(); }

private:
  static constexpr std::int64_t infinity_raw = std::numeric_limits<std::int64_t>::max();

  explicit constexpr Bound(std::int64_t raw) noexcept : raw_(raw) {}

  static std::int64_t encode(value_type c, bool weak)
  {
    if (c > max_constant || c < -max_constant)
      throw overflow_error("bound constant " + std::to_string(c) + " out of range");
    return 2 * c + (weak ? 1 : 0);
  }

  std::int64_t raw_;
};

inline Bound min(Bound a, Bound b) noexcept { return a < b ? a : b; }

} // namespace lzg
