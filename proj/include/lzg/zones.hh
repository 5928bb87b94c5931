#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lzg/dbm.hh"
#include "lzg/model.hh"

namespace lzg {

/// Variable layouts derived from a network.
///
/// Local layout: zero, one reference `t_P` per process, one offset `~x` per
/// clock. Global layout: zero, `t`, the offsets. Clock layout: zero, the clocks.
/// A clock value is its reference minus its offset.
class ZoneSpaces {
public:
  explicit ZoneSpaces(Network const & net) : net_(&net)
  {
    std::vector<std::string> local;
    std::vector<std::string> global{"t"};
    std::vector<std::string> clocks;
    for (auto const & p : net.processes())
      local.push_back("t_" + p.name);
    for (auto const & c : net.clocks()) {
      local.push_back("~" + c.name);
      global.push_back("~" + c.name);
      clocks.push_back(c.name);
    }
    local_ = make_layout(std::move(local));
    global_ = make_layout(std::move(global));
    clock_ = make_layout(std::move(clocks));
  }

  Network const & network() const noexcept { return *net_; }
  LayoutPtr const & local_layout() const noexcept { return local_; }
  LayoutPtr const & global_layout() const noexcept { return global_; }
  LayoutPtr const & clock_layout() const noexcept { return clock_; }

  std::size_t process_count() const noexcept { return net_->process_count(); }
  std::size_t clock_count() const noexcept { return net_->clock_count(); }

  VarIndex local_ref(ProcessId p) const { return VarIndex{1 + p}; }
  VarIndex local_offset(ClockId x) const { return VarIndex{1 + process_count() + x}; }
  VarIndex local_owner_ref(ClockId x) const { return local_ref(net_->clocks().at(x).owner); }

  static constexpr VarIndex global_ref() { return VarIndex{1}; }
  VarIndex global_offset(ClockId x) const { return VarIndex{2 + x}; }

  VarIndex clock_var(ClockId x) const { return VarIndex{1 + x}; }

private:
  Network const * net_;
  LayoutPtr local_;
  LayoutPtr global_;
  LayoutPtr clock_;
};

/// Difference constraints `ref - offset ~ c` for each atom `x ~ c`, where
/// `ref_of(x)` and `offset_of(x)` give the variables of clock x.
template <class RefOf, class OffsetOf>
std::vector<DifferenceConstraint> guard_constraints(Guard const & g, RefOf ref_of, OffsetOf offset_of)
{
  std::vector<DifferenceConstraint> out;
  for (auto const & a : g.atoms) {
    VarIndex const r = ref_of(a.clock);
    VarIndex const o = offset_of(a.clock);
    switch (a.rel) {
    case Relation::lt:
      out.push_back({r, o, Bound::lt(a.constant)});
      break;
    case Relation::le:
      out.push_back({r, o, Bound::le(a.constant)});
      break;
    case Relation::eq:
      out.push_back({r, o, Bound::le(a.constant)});
      out.push_back({o, r, Bound::le(-a.constant)});
      break;
    case Relation::ge:
      out.push_back({o, r, Bound::le(-a.constant)});
      break;
    case Relation::gt:
      out.push_back({o, r, Bound::lt(-a.constant)});
      break;
    }
  }
  return out;
}

inline std::vector<DifferenceConstraint> guard_local(ZoneSpaces const & s, Guard const & g)
{
  return guard_constraints(
      g, [&](ClockId x) { return s.local_owner_ref(x); }, [&](ClockId x) { return s.local_offset(x); });
}

inline std::vector<DifferenceConstraint> guard_global(ZoneSpaces const & s, Guard const & g)
{
  return guard_constraints(
      g, [](ClockId) { return ZoneSpaces::global_ref(); }, [&](ClockId x) { return s.global_offset(x); });
}

/// Lets every process advance its own reference independently.
inline Dbm local_elapse(ZoneSpaces const & s, Dbm z)
{
  for (ProcessId p = 0; p < s.process_count(); ++p)
    z.free_upper_in_place(s.local_ref(p));
  return z;
}

inline Dbm elapse(Dbm z) { return free_upper(std::move(z), ZoneSpaces::global_ref()); }

inline Dbm initial_local_zone(ZoneSpaces const & s) { return local_elapse(s, Dbm::zero(s.local_layout())); }

inline Dbm initial_global_zone(ZoneSpaces const & s) { return elapse(Dbm::zero(s.global_layout())); }

/// Resets each clock of `resets` to its owner's current local time.
inline Dbm apply_reset_local(ZoneSpaces const & s, Dbm z, std::vector<ClockId> const & resets)
{
  for (ClockId x : resets)
    z.assign_in_place(s.local_offset(x), s.local_owner_ref(x));
  return z;
}

inline Dbm apply_reset_global(ZoneSpaces const & s, Dbm z, std::vector<ClockId> const & resets)
{
  for (ClockId x : resets)
    z.assign_in_place(s.global_offset(x), ZoneSpaces::global_ref());
  return z;
}

/// Constraints making the references of `procs` equal.
inline std::vector<DifferenceConstraint> equal_refs(ZoneSpaces const & s, std::vector<ProcessId> const & procs)
{
  std::vector<DifferenceConstraint> out;
  for (std::size_t k = 1; k < procs.size(); ++k) {
    out.push_back({s.local_ref(procs[0]), s.local_ref(procs[k]), Bound::le_zero()});
    out.push_back({s.local_ref(procs[k]), s.local_ref(procs[0]), Bound::le_zero()});
  }
  return out;
}

/// Synchronized valuations of a local zone: all references equal.
inline std::optional<Dbm> sync(ZoneSpaces const & s, Dbm const & z)
{
  std::vector<ProcessId> all(s.process_count());
  for (ProcessId p = 0; p < all.size(); ++p)
    all[p] = p;
  return constrain(z, equal_refs(s, all));
}

/// Global zone of the synchronized part, all references renamed to `t`.
inline std::optional<Dbm> global_of_sync(ZoneSpaces const & s, Dbm const & z)
{
  auto synced = sync(s, z);
  if (!synced)
    return std::nullopt;
  // After sync every t_p carries the same bounds, so t_1 alone represents t.
  std::vector<VarIndex> from{zero_var, s.local_ref(0)};
  for (ClockId x = 0; x < s.clock_count(); ++x)
    from.push_back(s.local_offset(x));
  Dbm g = Dbm::universal(s.global_layout());
  for (std::size_t i = 0; i < from.size(); ++i)
    for (std::size_t j = 0; j < from.size(); ++j)
      g.set(VarIndex{i}, VarIndex{j}, synced->at(from[i], from[j]));
  return g;
}

/// Synchronized local zone whose valuations mirror those of the global zone.
inline Dbm local_of_global(ZoneSpaces const & s, Dbm const & g)
{
  auto const & layout = s.local_layout();
  std::vector<VarIndex> to_global(layout->size());
  to_global[0] = zero_var;
  for (ProcessId p = 0; p < s.process_count(); ++p)
    to_global[s.local_ref(p).value] = ZoneSpaces::global_ref();
  for (ClockId x = 0; x < s.clock_count(); ++x)
    to_global[s.local_offset(x).value] = s.global_offset(x);
  Dbm z = Dbm::universal(layout);
  for (std::size_t i = 0; i < to_global.size(); ++i)
    for (std::size_t j = 0; j < to_global.size(); ++j)
      z.set(VarIndex{i}, VarIndex{j}, g.at(to_global[i], to_global[j]));
  return z;
}

/// Zone over clock values `x = t - ~x`. The reference `t` becomes the zero of
/// the clock layout, so the result is the transposed submatrix over t and the
/// offsets.
inline Dbm to_clock_zone(ZoneSpaces const & s, Dbm const & g)
{
  std::vector<VarIndex> from{ZoneSpaces::global_ref()};
  for (ClockId x = 0; x < s.clock_count(); ++x)
    from.push_back(s.global_offset(x));
  Dbm c = Dbm::universal(s.clock_layout());
  for (std::size_t i = 0; i < from.size(); ++i)
    for (std::size_t j = 0; j < from.size(); ++j)
      c.set(VarIndex{i}, VarIndex{j}, g.at(from[j], from[i]));
  return c;
}

/// Maximal-constant extrapolation of a clock zone. Clocks never compared in a
/// guard are treated as having bound 0: they keep their order with respect to
/// the other clocks but lose every other constant.
inline Dbm extra_m(Dbm z, MaxConstants const & m)
{
  std::size_t const n = z.dim();
  std::vector<std::int64_t> bound(n, 0);
  for (std::size_t i = 1; i < n; ++i)
    bound[i] = std::max<std::int64_t>(0, m.of(i - 1).value_or(0));
  // Widening followed by closure may expose new entries above the bounds;
  // repeating until the closed matrix stops changing gives an idempotent
  // operator.
  while (true) {
    Dbm const before = z;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j)
          continue;
        VarIndex const vi{i}, vj{j};
        Bound const d = z.at(vi, vj);
        if (d.is_infinity())
          continue;
        if (d > Bound::le(bound[i]))
          z.set(vi, vj, Bound::infinity());
        else if (d < Bound::lt(-bound[j]))
          z.set(vi, vj, Bound::lt(-bound[j]));
      }
    }
    if (z == before)
      return z;
    if (!z.tighten())
      throw std::logic_error("extrapolation produced an empty zone");
    if (z == before)
      return z;
  }
}

/// Clock zone of the synchronized part of a local zone, if any.
inline std::optional<Dbm> sync_clock_zone(ZoneSpaces const & s, Dbm const & z)
{
  auto g = global_of_sync(s, z);
  if (!g)
    return std::nullopt;
  return to_clock_zone(s, *g);
}

/// Whether `candidate` is covered by `established`: the synchronized part of
/// the candidate lies inside the extrapolated synchronized part of the other.
inline bool sync_subsume(ZoneSpaces const & s, Dbm const & candidate, Dbm const & established,
                         MaxConstants const & m)
{
  auto cand = sync_clock_zone(s, candidate);
  if (!cand)
    return true;
  auto est = sync_clock_zone(s, established);
  if (!est)
    return false;
  return includes(extra_m(*est, m), *cand);
}

/// Global-zone subsumption: Z is covered by Z' when Z lies in the
/// extrapolation of Z'.
inline bool global_subsume(ZoneSpaces const & s, Dbm const & candidate, Dbm const & established,
                           MaxConstants const & m)
{
  return includes(extra_m(to_clock_zone(s, established), m), to_clock_zone(s, candidate));
}

} // namespace lzg
