#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lzg/bound.hh"

namespace lzg {

/// Position of a variable in a VariableLayout. Index 0 is the zero variable.
struct VarIndex {
  std::size_t value = 0;

  constexpr VarIndex() noexcept = default;
  constexpr explicit VarIndex(std::size_t v) noexcept : value(v) {}

  friend constexpr bool operator==(VarIndex, VarIndex) noexcept = default;
  friend constexpr auto operator<=>(VarIndex, VarIndex) noexcept = default;
};

inline constexpr VarIndex zero_var{0};

/// Immutable list of variable names. The first variable is always the zero
/// variable, fixed at value 0, which anchors absolute constraints.
class VariableLayout {
public:
  explicit VariableLayout(std::vector<std::string> names) : names_{"0"}
  {
    names_.insert(names_.end(), std::make_move_iterator(names.begin()), std::make_move_iterator(names.end()));
  }

  std::size_t size() const noexcept { return names_.size(); }
  std::string const & name(VarIndex i) const { return names_.at(i.value); }
  std::vector<std::string> const & names() const noexcept { return names_; }

  std::optional<VarIndex> find(std::string const & name) const
  {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name)
        return VarIndex{i};
    return std::nullopt;
  }

private:
  std::vector<std::string> names_;
};

using LayoutPtr = std::shared_ptr<VariableLayout const>;

inline LayoutPtr make_layout(std::vector<std::string> names)
{
  return std::make_shared<VariableLayout const>(std::move(names));
}

/// Single difference constraint `var_i - var_j <| bound`.
struct DifferenceConstraint {
  VarIndex i;
  VarIndex j;
  Bound bound;
};

/// Difference bound matrix over a VariableLayout: `at(i, j)` bounds
/// `var_i - var_j`.
///
/// The in-place mutators keep a canonical matrix canonical and report
/// emptiness through their return value. An empty Dbm is never kept around:
/// the value-returning free functions below return std::nullopt instead.
class Dbm {
public:
  /// All variables unconstrained except the diagonal.
  static Dbm universal(LayoutPtr layout)
  {
    Dbm d(std::move(layout));
    for (std::size_t i = 0; i < d.dim_; ++i)
      d.set(VarIndex{i}, VarIndex{i}, Bound::le_zero());
    return d;
  }

  /// The single point where every variable equals 0.
  static Dbm zero(LayoutPtr layout)
  {
    Dbm d(std::move(layout));
    std::fill(d.m_.begin(), d.m_.end(), Bound::le_zero());
    return d;
  }

  LayoutPtr const & layout() const noexcept { return layout_; }
  std::size_t dim() const noexcept { return dim_; }

  Bound at(VarIndex i, VarIndex j) const { return m_[i.value * dim_ + j.value]; }

  /// Raw entry write. The matrix is generally not canonical afterwards; call
  /// tighten().
  void set(VarIndex i, VarIndex j, Bound b) { m_[i.value * dim_ + j.value] = b; }

  /// Floyd-Warshall closure. Returns false iff the zone is empty.
  bool tighten()
  {
    std::size_t const n = dim_;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        Bound const ik = m_[i * n + k];
        if (ik.is_infinity())
          continue;
        for (std::size_t j = 0; j < n; ++j) {
          Bound const via = ik + m_[k * n + j];
          if (via < m_[i * n + j])
            m_[i * n + j] = via;
        }
      }
      if (m_[k * n + k] < Bound::le_zero())
        return false;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (m_[i * n + i] < Bound::le_zero())
        return false;
    return true;
  }

  /// Intersects a canonical matrix with `var_i - var_j <| b` and restores
  /// canonical form by O(n^2) incremental tightening. Returns false iff empty.
  bool constrain_in_place(VarIndex i, VarIndex j, Bound b)
  {
    check_index(i);
    check_index(j);
    if (b + at(j, i) < Bound::le_zero())
      return false;
    if (!(b < at(i, j)))
      return true;
    set(i, j, b);
    std::size_t const n = dim_;
    for (std::size_t k = 0; k < n; ++k) {
      Bound const ki = m_[k * n + i.value];
      if (ki.is_infinity())
        continue;
      Bound const kij = ki + b;
      for (std::size_t l = 0; l < n; ++l) {
        Bound const via = kij + m_[j.value * n + l];
        if (via < m_[k * n + l])
          m_[k * n + l] = via;
      }
    }
    return true;
  }

  /// Removes every upper bound on `var_i` (row i). Canonical in, canonical out.
  void free_upper_in_place(VarIndex i)
  {
    check_index(i);
    for (std::size_t j = 0; j < dim_; ++j)
      if (j != i.value)
        m_[i.value * dim_ + j] = Bound::infinity();
  }

  /// `var_i := var_j`. Canonical in, canonical out.
  void assign_in_place(VarIndex i, VarIndex j)
  {
    check_index(i);
    check_index(j);
    if (i == j)
      throw std::invalid_argument("assign requires distinct variables");
    for (std::size_t k = 0; k < dim_; ++k) {
      if (k == i.value)
        continue;
      m_[i.value * dim_ + k] = m_[j.value * dim_ + k];
      m_[k * dim_ + i.value] = m_[k * dim_ + j.value];
    }
    set(i, j, Bound::le_zero());
    set(j, i, Bound::le_zero());
    set(i, i, Bound::le_zero());
  }

  friend bool operator==(Dbm const & a, Dbm const & b)
  {
    return a.dim_ == b.dim_ && a.m_ == b.m_;
  }

  std::size_t hash() const noexcept
  {
    std::size_t h = dim_;
    for (Bound b : m_)
      h = h * 1000003u ^ std::hash<std::int64_t>{}(b.raw());
    return h;
  }

  /// Finite off-diagonal entries as `a - b <= c`, skipping the trivial
  /// constraints against the zero variable that only restate non-negativity.
  std::vector<std::string> constraint_strings() const
  {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        if (i == j)
          continue;
        Bound b = m_[i * dim_ + j];
        if (b.is_infinity())
          continue;
        if (i == 0 && b == Bound::le_zero())
          continue;
        std::ostringstream os;
        if (j == 0)
          os << layout_->name(VarIndex{i});
        else if (i == 0)
          os << "-" << layout_->name(VarIndex{j});
        else
          os << layout_->name(VarIndex{i}) << " - " << layout_->name(VarIndex{j});
        os << (b.is_strict() ? " < " : " <= ") << b.value();
        out.push_back(os.str());
      }
    }
    return out;
  }

  std::string to_string() const
  {
    std::string s = "{";
    bool first = true;
    for (auto const & c : constraint_strings()) {
      s += (first ? "" : ", ") + c;
      first = false;
    }
    return s + "}";
  }

private:
  explicit Dbm(LayoutPtr layout)
      : layout_(std::move(layout)), dim_(layout_->size()), m_(dim_ * dim_, Bound::infinity())
  {
  }

  void check_index(VarIndex i) const
  {
    if (i.value >= dim_)
      throw std::invalid_argument("variable index out of layout");
  }

  LayoutPtr layout_;
  std::size_t dim_;
  std::vector<Bound> m_;
};

inline void require_same_layout(Dbm const & a, Dbm const & b)
{
  if (a.layout() != b.layout() && a.layout()->names() != b.layout()->names())
    throw std::invalid_argument("DBM layout mismatch");
}

inline std::optional<Dbm> canonicalize(Dbm d)
{
  if (!d.tighten())
    return std::nullopt;
  return d;
}

inline std::optional<Dbm> constrain(Dbm d, VarIndex i, VarIndex j, Bound b)
{
  if (!d.constrain_in_place(i, j, b))
    return std::nullopt;
  return d;
}

inline std::optional<Dbm> constrain(Dbm d, std::vector<DifferenceConstraint> const & cs)
{
  for (auto const & c : cs)
    if (!d.constrain_in_place(c.i, c.j, c.bound))
      return std::nullopt;
  return d;
}

/// Entrywise comparison; equivalent to set inclusion for canonical matrices.
inline bool includes(Dbm const & outer, Dbm const & inner)
{
  require_same_layout(outer, inner);
  std::size_t const n = outer.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (outer.at(VarIndex{i}, VarIndex{j}) < inner.at(VarIndex{i}, VarIndex{j}))
        return false;
  return true;
}

inline Dbm free_upper(Dbm d, VarIndex i)
{
  d.free_upper_in_place(i);
  return d;
}

inline Dbm assign(Dbm d, VarIndex i, VarIndex j)
{
  d.assign_in_place(i, j);
  return d;
}

/// Pieces whose union is exactly `a \ b`. Each piece intersects `a` with the
/// negation of one constraint of `b` and with all constraints of `b` handled
/// before it, so pieces are pairwise disjoint.
inline std::vector<Dbm> subtract(Dbm const & a, Dbm const & b)
{
  require_same_layout(a, b);
  std::vector<Dbm> pieces;
  Dbm rest = a;
  std::size_t const n = a.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j)
        continue;
      VarIndex const vi{i}, vj{j};
      Bound const cut = b.at(vi, vj);
      if (cut.is_infinity() || !(cut < rest.at(vi, vj)))
        continue;
      if (auto piece = constrain(rest, vj, vi, cut.negated()))
        pieces.push_back(std::move(*piece));
      if (!rest.constrain_in_place(vi, vj, cut))
        return pieces;
    }
  }
  // what remains lies inside b
  return pieces;
}

/// `a \ b` where an absent `b` stands for the empty zone.
inline std::vector<Dbm> subtract(Dbm const & a, std::optional<Dbm> const & b)
{
  if (!b)
    return {a};
  return subtract(a, *b);
}

struct DbmHash {
  std::size_t operator()(Dbm const & d) const noexcept { return d.hash(); }
};

} // namespace lzg
