#pragma once

#include <random>
#include <vector>

#include "lzg/dbm.hh"
#include "lzg/point.hh"

namespace lzg::testing {

/// Random non-empty canonical zone: a few random difference constraints with
/// small constants, retried until satisfiable.
inline Dbm random_zone(LayoutPtr const & layout, std::mt19937_64 & rng, int constraints = 4, int range = 5)
{
  std::uniform_int_distribution<std::size_t> var(0, layout->size() - 1);
  std::uniform_int_distribution<int> value(-range, range);
  std::bernoulli_distribution strict(0.3);
  while (true) {
    Dbm d = Dbm::universal(layout);
    for (int k = 0; k < constraints; ++k) {
      std::size_t i = var(rng), j = var(rng);
      if (i == j)
        continue;
      d.set(VarIndex{i}, VarIndex{j}, min(d.at(VarIndex{i}, VarIndex{j}), Bound::make(value(rng), strict(rng))));
    }
    if (auto c = canonicalize(d))
      return *c;
  }
}

/// Random point on the half-integer grid of [-lo, hi] for every non-zero
/// variable; independent of any zone.
inline Point random_grid_point(std::size_t dim, std::mt19937_64 & rng, int lo = -2, int hi = 7)
{
  std::uniform_int_distribution<int> half(2 * lo, 2 * hi);
  Point p(dim, Rational(0));
  for (std::size_t i = 1; i < dim; ++i)
    p[i] = Rational(half(rng), 2);
  return p;
}

} // namespace lzg::testing
