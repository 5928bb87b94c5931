#pragma once

#include <optional>
#include <random>
#include <vector>

#include "lzg/dbm.hh"
#include "lzg/rational.hh"

namespace lzg {

/// Exact valuation of every variable of a layout, indexed by VarIndex::value.
/// Entry 0 is the zero variable and must be 0.
using Point = std::vector<Rational>;

/// Membership of a point in the zone described by `d`, evaluated constraint by
/// constraint (no closure needed, works on any matrix).
inline bool contains(Dbm const & d, Point const & p)
{
  if (p.size() != d.dim() || p[0] != Rational(0))
    return false;
  for (std::size_t i = 0; i < d.dim(); ++i)
    for (std::size_t j = 0; j < d.dim(); ++j)
      if (i != j && !satisfies(p[i] - p[j], d.at(VarIndex{i}, VarIndex{j})))
        return false;
  return true;
}

/// Admissible values for one variable, as an interval with optional ends.
struct Interval {
  std::optional<Rational> lo;
  bool lo_strict = false;
  std::optional<Rational> hi;
  bool hi_strict = false;

  bool is_empty() const
  {
    if (!lo || !hi)
      return false;
    if (*lo > *hi)
      return true;
    return *lo == *hi && (lo_strict || hi_strict);
  }

  bool contains(Rational v) const
  {
    if (lo && (lo_strict ? v <= *lo : v < *lo))
      return false;
    if (hi && (hi_strict ? v >= *hi : v > *hi))
      return false;
    return true;
  }

  void cap_above(Rational v, bool strict)
  {
    if (!hi || v < *hi || (v == *hi && strict)) {
      hi = v;
      hi_strict = strict;
    }
  }

  void cap_below(Rational v, bool strict)
  {
    if (!lo || v > *lo || (v == *lo && strict)) {
      lo = v;
      lo_strict = strict;
    }
  }
};

/// Picks a value in a non-empty interval. Prefers points of the half-integer
/// grid, lowest first when `rng` is null and uniformly otherwise; falls back to
/// the midpoint when the interval holds no grid point. `span` limits how far
/// above the lower end an unbounded interval is explored.
template <class Rng = std::mt19937_64>
Rational choose_in(Interval const & iv, Rng * rng = nullptr, std::int64_t span = 4)
{
  Interval w = iv;
  if (!w.lo) {
    w.lo = w.hi ? *w.hi - Rational(span) : Rational(0);
    w.lo_strict = false;
  }
  Rational const twice_lo = *w.lo * Rational(2);
  std::int64_t k_min = twice_lo.floor();
  if (w.lo_strict || Rational(k_min) < twice_lo)
    k_min += 1;
  std::int64_t k_max = k_min + 2 * span;
  if (w.hi) {
    Rational const twice_hi = *w.hi * Rational(2);
    std::int64_t k = twice_hi.floor();
    if (w.hi_strict && Rational(k) == twice_hi)
      k -= 1;
    k_max = std::min(k_max, k);
  }
  if (k_min <= k_max) {
    std::int64_t k = k_min;
    if (rng != nullptr)
      k = std::uniform_int_distribution<std::int64_t>(k_min, k_max)(*rng);
    return Rational(k, 2);
  }
  return (*w.lo + *w.hi) / Rational(2);
}

/// Builds a point of a canonical zone one variable at a time. For a canonical
/// matrix, any partial assignment that satisfies the constraints among the
/// assigned variables extends to a full point, so the interval of the next
/// variable only depends on the variables fixed so far.
class PointBuilder {
public:
  explicit PointBuilder(Dbm const & d) : dbm_(d), values_(d.dim(), Rational(0)), fixed_(d.dim(), false)
  {
    fixed_[0] = true;
  }

  bool is_fixed(VarIndex x) const { return fixed_[x.value]; }

  Interval interval(VarIndex x) const
  {
    Interval iv;
    for (std::size_t y = 0; y < dbm_.dim(); ++y) {
      if (!fixed_[y] || y == x.value)
        continue;
      Bound const up = dbm_.at(x, VarIndex{y}); // x - y <| c
      if (!up.is_infinity())
        iv.cap_above(values_[y] + Rational(up.value()), up.is_strict());
      Bound const down = dbm_.at(VarIndex{y}, x); // y - x <| c
      if (!down.is_infinity())
        iv.cap_below(values_[y] - Rational(down.value()), down.is_strict());
    }
    return iv;
  }

  /// Fixes `x` to `v`; false (and nothing changed) if `v` is not admissible.
  bool fix(VarIndex x, Rational v)
  {
    if (!interval(x).contains(v))
      return false;
    values_[x.value] = v;
    fixed_[x.value] = true;
    return true;
  }

  /// Fixes every remaining variable in index order. False if some interval is
  /// empty, which only happens when the earlier choices were inconsistent.
  template <class Rng = std::mt19937_64>
  bool complete(Rng * rng = nullptr, std::int64_t span = 4)
  {
    for (std::size_t x = 1; x < dbm_.dim(); ++x) {
      if (fixed_[x])
        continue;
      Interval const iv = interval(VarIndex{x});
      if (iv.is_empty())
        return false;
      values_[x] = choose_in(iv, rng, span);
      fixed_[x] = true;
    }
    return true;
  }

  Point const & point() const { return values_; }

private:
  Dbm const & dbm_;
  Point values_;
  std::vector<bool> fixed_;
};

/// Random point of a canonical non-empty zone, half-integer where possible.
template <class Rng>
Point sample_point(Dbm const & d, Rng & rng, std::int64_t span = 4)
{
  PointBuilder b(d);
  if (!b.complete(&rng, span))
    throw std::logic_error("sample_point on an empty or non-canonical zone");
  return b.point();
}

} // namespace lzg
