#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lzg/corpus.hh"
#include "lzg/explore.hh"
#include "lzg/point.hh"
#include "lzg/random_network.hh"

namespace lzg {

// Concrete valuations -------------------------------------------------------

/// All references and offsets at 0 (global layout).
inline Point initial_global_valuation(ZoneSpaces const & s) { return Point(s.global_layout()->size(), Rational(0)); }

inline Point initial_local_valuation(ZoneSpaces const & s) { return Point(s.local_layout()->size(), Rational(0)); }

/// Local valuation with every process at the global time of `v`.
inline Point local_of(ZoneSpaces const & s, Point const & v)
{
  Point out(s.local_layout()->size(), Rational(0));
  for (ProcessId p = 0; p < s.process_count(); ++p)
    out[s.local_ref(p).value] = v[ZoneSpaces::global_ref().value];
  for (ClockId x = 0; x < s.clock_count(); ++x)
    out[s.local_offset(x).value] = v[s.global_offset(x).value];
  return out;
}

inline bool is_synchronized(ZoneSpaces const & s, Point const & lv)
{
  for (ProcessId p = 1; p < s.process_count(); ++p)
    if (lv[s.local_ref(p).value] != lv[s.local_ref(0).value])
      return false;
  return true;
}

/// Global valuation of a synchronized local valuation.
inline std::optional<Point> global_of(ZoneSpaces const & s, Point const & lv)
{
  if (!is_synchronized(s, lv))
    return std::nullopt;
  Point out(s.global_layout()->size(), Rational(0));
  out[ZoneSpaces::global_ref().value] = lv[s.local_ref(0).value];
  for (ClockId x = 0; x < s.clock_count(); ++x)
    out[s.global_offset(x).value] = lv[s.local_offset(x).value];
  return out;
}

inline std::string point_string(LayoutPtr const & layout, Point const & v)
{
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 1; i < v.size(); ++i)
    os << (i > 1 ? ", " : "") << layout->name(VarIndex{i}) << "=" << v[i];
  os << "}";
  return os.str();
}

inline bool holds(Relation r, Rational value, std::int64_t c)
{
  switch (r) {
  case Relation::lt:
    return value < Rational(c);
  case Relation::le:
    return value <= Rational(c);
  case Relation::eq:
    return value == Rational(c);
  case Relation::ge:
    return value >= Rational(c);
  case Relation::gt:
    return value > Rational(c);
  }
  return false;
}

// Timed words and their execution -------------------------------------------

struct GlobalStep {
  Rational delay;
  Move move;
};

/// Global timed word: delay, action, delay, action, ..., final delay.
struct GlobalWord {
  std::vector<GlobalStep> steps;
  Rational final_delay{0};
};

/// Local delay `+_p delay`.
struct LocalDelay {
  ProcessId process = 0;
  Rational delay;
};

using LocalLetter = std::variant<LocalDelay, Move>;
using LocalWord = std::vector<LocalLetter>;

/// Replay outcome. `trace` holds the starting valuation followed by the
/// valuation after each global step (or each local letter); when stuck it
/// stops before the offending letter.
struct Replay {
  bool ok = true;
  std::string stuck;
  std::size_t position = 0;
  StateVector q;
  std::vector<Point> trace;

  Point const & end() const { return trace.back(); }
};

namespace detail {

/// Reason why `m` cannot be taken from `q` ignoring clocks, if any.
inline std::optional<std::string> discrete_problem(Network const & net, StateVector const & q, Move const & m)
{
  if (m.action >= net.action_count())
    return "unknown action";
  auto const & dom = net.dom(m.action);
  if (m.transitions.size() != dom.size())
    return "move of " + net.action_name(m.action) + " does not list one transition per process";
  for (std::size_t k = 0; k < dom.size(); ++k) {
    auto const & proc = net.process(dom[k]);
    if (m.transitions[k] >= proc.transitions.size() || proc.transitions[m.transitions[k]].action != m.action)
      return "move of " + net.action_name(m.action) + " uses a foreign transition";
    if (proc.transitions[m.transitions[k]].source != q[dom[k]])
      return "move " + net.move_string(m) + " not enabled in " + net.state_string(q);
  }
  return std::nullopt;
}

/// First violated atom of the move's guards, given each clock's value.
template <class ClockValue>
std::optional<std::string> guard_problem(Network const & net, Move const & m, ClockValue value)
{
  for (std::size_t k = 0; k < m.transitions.size(); ++k) {
    for (auto const & a : move_transition(net, m, k).guard.atoms) {
      Rational const v = value(a.clock);
      if (!holds(a.rel, v, a.constant))
        return "guard " + net.clocks()[a.clock].name + std::string(to_string(a.rel)) + std::to_string(a.constant) +
               " of " + net.action_name(m.action) + " violated (" + net.clocks()[a.clock].name + "=" +
               v.to_string() + ")";
    }
  }
  return std::nullopt;
}

} // namespace detail

inline Replay exec_global(ZoneSpaces const & s, GlobalWord const & w, StateVector q, Point v)
{
  auto const & net = s.network();
  Replay r;
  r.q = std::move(q);
  r.trace.push_back(v);
  VarIndex const t = ZoneSpaces::global_ref();
  auto fail = [&](std::size_t pos, std::string why) {
    r.ok = false;
    r.position = pos;
    r.stuck = std::move(why);
    return r;
  };
  for (std::size_t i = 0; i < w.steps.size(); ++i) {
    auto const & st = w.steps[i];
    if (st.delay < Rational(0))
      return fail(i, "negative delay");
    if (auto why = detail::discrete_problem(net, r.q, st.move))
      return fail(i, *why);
    v[t.value] += st.delay;
    auto clock_value = [&](ClockId x) { return v[t.value] - v[s.global_offset(x).value]; };
    if (auto why = detail::guard_problem(net, st.move, clock_value))
      return fail(i, *why);
    for (std::size_t k = 0; k < st.move.transitions.size(); ++k)
      for (ClockId x : move_transition(net, st.move, k).resets)
        v[s.global_offset(x).value] = v[t.value];
    r.q = apply_move(net, r.q, st.move);
    r.trace.push_back(v);
  }
  if (w.final_delay < Rational(0))
    return fail(w.steps.size(), "negative delay");
  v[t.value] += w.final_delay;
  r.trace.push_back(v);
  return r;
}

inline Replay exec_global(ZoneSpaces const & s, GlobalWord const & w)
{
  return exec_global(s, w, s.network().initial_state(), initial_global_valuation(s));
}

inline Replay exec_local(ZoneSpaces const & s, LocalWord const & w, StateVector q, Point v)
{
  auto const & net = s.network();
  Replay r;
  r.q = std::move(q);
  r.trace.push_back(v);
  auto fail = [&](std::size_t pos, std::string why) {
    r.ok = false;
    r.position = pos;
    r.stuck = std::move(why);
    return r;
  };
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (auto const * d = std::get_if<LocalDelay>(&w[i])) {
      if (d->delay < Rational(0))
        return fail(i, "negative delay");
      if (d->process >= s.process_count())
        return fail(i, "unknown process");
      v[s.local_ref(d->process).value] += d->delay;
    } else {
      Move const & m = std::get<Move>(w[i]);
      if (auto why = detail::discrete_problem(net, r.q, m))
        return fail(i, *why);
      auto const & dom = net.dom(m.action);
      for (ProcessId p : dom)
        if (v[s.local_ref(p).value] != v[s.local_ref(dom.front()).value])
          return fail(i, "local times of the processes of " + net.action_name(m.action) + " differ");
      auto clock_value = [&](ClockId x) { return v[s.local_owner_ref(x).value] - v[s.local_offset(x).value]; };
      if (auto why = detail::guard_problem(net, m, clock_value))
        return fail(i, *why);
      for (std::size_t k = 0; k < m.transitions.size(); ++k)
        for (ClockId x : move_transition(net, m, k).resets)
          v[s.local_offset(x).value] = v[s.local_owner_ref(x).value];
      r.q = apply_move(net, r.q, m);
    }
    r.trace.push_back(v);
  }
  return r;
}

inline Replay exec_local(ZoneSpaces const & s, LocalWord const & w)
{
  return exec_local(s, w, s.network().initial_state(), initial_local_valuation(s));
}

/// Local word simulating a global one: each global delay becomes the same
/// local delay on every process.
inline LocalWord expand_delays(ZoneSpaces const & s, GlobalWord const & w)
{
  LocalWord out;
  auto delay_all = [&](Rational d) {
    for (ProcessId p = 0; p < s.process_count(); ++p)
      out.push_back(LocalDelay{p, d});
  };
  for (auto const & st : w.steps) {
    delay_all(st.delay);
    out.push_back(st.move);
  }
  delay_all(w.final_delay);
  return out;
}

inline std::string local_word_string(Network const & net, LocalWord const & w)
{
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    os << (i ? " " : "");
    if (auto const * d = std::get_if<LocalDelay>(&w[i]))
      os << "+" << net.process(d->process).name << "(" << d->delay << ")";
    else
      os << net.move_string(std::get<Move>(w[i]));
  }
  return os.str();
}

inline std::string global_word_string(Network const & net, GlobalWord const & w)
{
  std::ostringstream os;
  for (auto const & st : w.steps)
    os << "(" << st.delay << ") " << net.move_string(st.move) << " ";
  os << "(" << w.final_delay << ")";
  return os.str();
}

/// Moves along a space separated list of action names, taking the first
/// enabled sync set for each; nullopt if some action is not enabled.
inline std::optional<std::vector<Move>> resolve_word(Network const & net, std::string const & names,
                                                     StateVector q = {})
{
  if (q.empty())
    q = net.initial_state();
  std::vector<Move> out;
  std::istringstream in(names);
  for (std::string a; in >> a;) {
    auto id = net.find_action(a);
    if (!id)
      return std::nullopt;
    auto ms = enabled_sync_sets(net, q, *id);
    if (ms.empty())
      return std::nullopt;
    q = apply_move(net, q, ms.front());
    out.push_back(ms.front());
  }
  return out;
}

// Trace equivalence ----------------------------------------------------------

/// All words obtained from `u` by repeatedly swapping adjacent moves whose
/// actions have disjoint domains, sorted.
inline std::vector<std::vector<Move>> trace_class(Network const & net, std::vector<Move> const & u,
                                                  std::size_t bound = 8)
{
  if (u.size() > bound)
    throw std::length_error("word of length " + std::to_string(u.size()) + " exceeds the trace class bound " +
                            std::to_string(bound));
  std::set<std::vector<Move>> seen{u};
  std::vector<std::vector<Move>> todo{u};
  while (!todo.empty()) {
    auto w = std::move(todo.back());
    todo.pop_back();
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (!net.independent(w[i].action, w[i + 1].action))
        continue;
      auto v = w;
      std::swap(v[i], v[i + 1]);
      if (seen.insert(v).second)
        todo.push_back(std::move(v));
    }
  }
  return {seen.begin(), seen.end()};
}

// Aggregated zones -----------------------------------------------------------

/// Finite union of zones over one layout.
using Federation = std::vector<Dbm>;

/// End zones of the global zone graph along every word trace equivalent to
/// `u`, starting from (q, z). Duplicates are dropped.
inline Federation mz_bruteforce(ZoneSpaces const & s, StateVector const & q, Dbm const & z,
                                std::vector<Move> const & u)
{
  auto const & net = s.network();
  Federation out;
  for (auto const & w : trace_class(net, u)) {
    StateVector qq = q;
    std::optional<Dbm> zz = z;
    for (Move const & m : w) {
      if (detail::discrete_problem(net, qq, m)) {
        zz.reset();
        break;
      }
      zz = global_step(s, *zz, m);
      if (!zz)
        break;
      qq = apply_move(net, qq, m);
    }
    if (zz && std::find(out.begin(), out.end(), *zz) == out.end())
      out.push_back(std::move(*zz));
  }
  return out;
}

/// Pieces of `a` outside every member of `f`.
inline std::vector<Dbm> subtract(Dbm const & a, Federation const & f)
{
  std::vector<Dbm> rest{a};
  for (auto const & m : f) {
    std::vector<Dbm> next;
    for (auto const & piece : rest)
      for (auto & p : subtract(piece, m))
        next.push_back(std::move(p));
    rest = std::move(next);
  }
  return rest;
}

/// Local zone reached along `u` from (q, z), or nullopt if some step is
/// disabled.
inline std::optional<Dbm> local_path_zone(ZoneSpaces const & s, StateVector q, Dbm z, std::vector<Move> const & u)
{
  for (Move const & m : u) {
    if (detail::discrete_problem(s.network(), q, m))
      return std::nullopt;
    auto next = local_step(s, z, m);
    if (!next)
      return std::nullopt;
    z = std::move(*next);
    q = apply_move(s.network(), q, m);
  }
  return z;
}

struct AggregationCheck {
  bool pass = true;
  std::optional<Dbm> local_side; // global zone of the synchronized part
  Federation members;
  std::string failure;
  std::optional<Point> witness;
};

/// Compares the synchronized part of the local zone reached along `u` from
/// local_elapse(local(z)) with the union of the global zones reached along the
/// trace class of `u` from z. Equality is checked both ways: every member lies
/// inside the local side, and nothing of the local side is left after
/// subtracting all members.
inline AggregationCheck check_aggregation_theorem(ZoneSpaces const & s, StateVector const & q, Dbm const & z,
                                                  std::vector<Move> const & u)
{
  AggregationCheck r;
  r.members = mz_bruteforce(s, q, z, u);
  if (auto lz = local_path_zone(s, q, local_elapse(s, local_of_global(s, z)), u))
    r.local_side = global_of_sync(s, *lz);
  auto witness_of = [](Dbm const & d) {
    PointBuilder b(d);
    b.complete();
    return b.point();
  };
  if (!r.local_side) {
    if (!r.members.empty()) {
      r.pass = false;
      r.failure = "local side empty but " + std::to_string(r.members.size()) + " interleaving(s) succeed";
      r.witness = witness_of(r.members.front());
    }
    return r;
  }
  for (auto const & m : r.members) {
    if (!includes(*r.local_side, m)) {
      r.pass = false;
      r.failure = "interleaving zone not inside the local side";
      r.witness = witness_of(subtract(m, *r.local_side).front());
      return r;
    }
  }
  auto rest = subtract(*r.local_side, r.members);
  if (!rest.empty()) {
    r.pass = false;
    r.failure = "local side holds valuations reached by no interleaving";
    r.witness = witness_of(rest.front());
  }
  return r;
}

inline AggregationCheck check_aggregation_theorem(ZoneSpaces const & s, std::vector<Move> const & u)
{
  return check_aggregation_theorem(s, s.network().initial_state(), initial_global_zone(s), u);
}

/// Result of a batch of checks.
struct CheckResult {
  std::string name;
  std::size_t checked = 0;
  std::vector<std::string> failures;

  bool pass() const { return failures.empty(); }

  void merge(CheckResult const & o)
  {
    checked += o.checked;
    failures.insert(failures.end(), o.failures.begin(), o.failures.end());
  }
};

/// Every word of moves of length at most `depth` that is enabled in the
/// discrete states (clocks ignored), including the empty word.
inline std::vector<std::vector<Move>> discrete_words(Network const & net, std::size_t depth)
{
  std::vector<std::pair<std::vector<Move>, StateVector>> all{{{}, net.initial_state()}};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].first.size() >= depth)
      continue;
    for (Move const & m : enabled_moves(net, all[i].second)) {
      auto w = all[i].first;
      w.push_back(m);
      all.emplace_back(std::move(w), apply_move(net, all[i].second, m));
    }
  }
  std::vector<std::vector<Move>> out;
  for (auto & [w, q] : all)
    out.push_back(std::move(w));
  return out;
}

/// Aggregation check on every discretely enabled word up to `depth`.
inline CheckResult check_aggregation_words(Network const & net, std::size_t depth, std::string const & label)
{
  ZoneSpaces const s(net);
  CheckResult r{"aggregation " + label, 0, {}};
  for (auto const & u : discrete_words(net, depth)) {
    auto c = check_aggregation_theorem(s, u);
    ++r.checked;
    if (!c.pass)
      r.failures.push_back(label + ": " + witness_string(net, u) + ": " + c.failure +
                           (c.witness ? " at " + point_string(s.global_layout(), *c.witness) : ""));
  }
  return r;
}

/// Aggregation check on `count` random acyclic networks, every word up to
/// `depth`.
inline CheckResult check_aggregation_random(std::size_t count, std::uint64_t seed, std::size_t depth = 5)
{
  CheckResult r{"aggregation random", 0, {}};
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::string const name = "random" + std::to_string(i);
    Network const net = parse_network(random_acyclic_network(rng, {}, name));
    r.merge(check_aggregation_words(net, depth, name));
  }
  return r;
}

// Random runs ----------------------------------------------------------------

namespace detail {

/// Admissible execution times T of `m` given the offsets of `v`: T at least
/// `earliest` and every guard atom `T - offset(x) ~ c` satisfied.
template <class OffsetOf>
Interval firing_window(Network const & net, Point const & v, Move const & m, Rational earliest, OffsetOf offset_of)
{
  Interval iv;
  iv.cap_below(earliest, false);
  for (std::size_t k = 0; k < m.transitions.size(); ++k) {
    for (auto const & a : move_transition(net, m, k).guard.atoms) {
      Rational const c = Rational(a.constant) + v[offset_of(a.clock).value];
      switch (a.rel) {
      case Relation::lt:
        iv.cap_above(c, true);
        break;
      case Relation::le:
        iv.cap_above(c, false);
        break;
      case Relation::eq:
        iv.cap_above(c, false);
        iv.cap_below(c, false);
        break;
      case Relation::ge:
        iv.cap_below(c, false);
        break;
      case Relation::gt:
        iv.cap_below(c, true);
        break;
      }
    }
  }
  return iv;
}

inline Interval local_window(ZoneSpaces const & s, Point const & v, Move const & m)
{
  Rational earliest(0);
  for (ProcessId p : s.network().dom(m.action))
    earliest = std::max(earliest, v[s.local_ref(p).value]);
  return firing_window(s.network(), v, m, earliest, [&](ClockId x) { return s.local_offset(x); });
}

inline Interval global_window(ZoneSpaces const & s, Point const & v, Move const & m)
{
  return firing_window(s.network(), v, m, v[ZoneSpaces::global_ref().value],
                       [&](ClockId x) { return s.global_offset(x); });
}

template <class Rng>
Rational random_delay(Rng & rng, std::int64_t max_halves = 4)
{
  return Rational(std::uniform_int_distribution<std::int64_t>(0, max_halves)(rng), 2);
}

} // namespace detail

/// Random global word of at most `length` steps that is executable from the
/// initial configuration: each delay is drawn from the window enabling the
/// chosen move.
template <class Rng>
GlobalWord random_global_word(ZoneSpaces const & s, std::size_t length, Rng & rng)
{
  auto const & net = s.network();
  GlobalWord w;
  StateVector q = net.initial_state();
  Point v = initial_global_valuation(s);
  VarIndex const t = ZoneSpaces::global_ref();
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<std::pair<Move, Interval>> options;
    for (Move const & m : enabled_moves(net, q)) {
      Interval iv = detail::global_window(s, v, m);
      if (!iv.is_empty())
        options.emplace_back(m, iv);
    }
    if (options.empty())
      break;
    auto const & [m, iv] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    Rational const at = choose_in(iv, &rng, 3);
    w.steps.push_back({at - v[t.value], m});
    v[t.value] = at;
    for (std::size_t k = 0; k < m.transitions.size(); ++k)
      for (ClockId x : move_transition(net, m, k).resets)
        v[s.global_offset(x).value] = at;
    q = apply_move(net, q, m);
  }
  w.final_delay = detail::random_delay(rng);
  return w;
}

/// Random local run. The letters of move i form the block
/// `blocks[i] = [begin, end)`: local delays bringing each process of its
/// domain to the execution time `times[i]`, then the move. A last block
/// brings every process to `end_time`, so the run ends synchronized.
struct LocalSample {
  LocalWord word;
  std::vector<Move> moves;
  std::vector<Rational> times;
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  Rational end_time;
};

template <class Rng>
LocalSample random_local_run(ZoneSpaces const & s, std::size_t length, Rng & rng)
{
  auto const & net = s.network();
  LocalSample out;
  StateVector q = net.initial_state();
  Point v = initial_local_valuation(s);
  for (std::size_t i = 0; i < length; ++i) {
    std::vector<std::pair<Move, Interval>> options;
    for (Move const & m : enabled_moves(net, q)) {
      Interval iv = detail::local_window(s, v, m);
      if (!iv.is_empty())
        options.emplace_back(m, iv);
    }
    if (options.empty())
      break;
    auto const & [m, iv] = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    Rational const at = choose_in(iv, &rng, 3);
    std::size_t const begin = out.word.size();
    for (ProcessId p : net.dom(m.action)) {
      out.word.push_back(LocalDelay{p, at - v[s.local_ref(p).value]});
      v[s.local_ref(p).value] = at;
    }
    out.word.push_back(m);
    for (std::size_t k = 0; k < m.transitions.size(); ++k)
      for (ClockId x : move_transition(net, m, k).resets)
        v[s.local_offset(x).value] = at;
    out.blocks.emplace_back(begin, out.word.size());
    out.moves.push_back(m);
    out.times.push_back(at);
    q = apply_move(net, q, m);
  }
  Rational latest(0);
  for (ProcessId p = 0; p < s.process_count(); ++p)
    latest = std::max(latest, v[s.local_ref(p).value]);
  out.end_time = latest + detail::random_delay(rng);
  for (ProcessId p = 0; p < s.process_count(); ++p)
    out.word.push_back(LocalDelay{p, out.end_time - v[s.local_ref(p).value]});
  return out;
}

/// Global word for a local run ending synchronized: moves ordered by
/// execution time (stable, so dependent moves keep their order), delays are
/// the differences of consecutive execution times.
inline GlobalWord soon_global_word(LocalSample const & run)
{
  std::vector<std::size_t> order(run.moves.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return run.times[a] < run.times[b]; });
  GlobalWord w;
  Rational prev(0);
  for (std::size_t i : order) {
    w.steps.push_back({run.times[i] - prev, run.moves[i]});
    prev = run.times[i];
  }
  w.final_delay = run.end_time - prev;
  return w;
}

/// Both directions of the translation between global and local runs on
/// `samples` random words of at most `max_length` moves each.
inline CheckResult check_run_translation(Network const & net, std::size_t samples, std::uint64_t seed,
                                         std::size_t max_length = 5)
{
  ZoneSpaces const s(net);
  CheckResult r{"run translation " + net.name(), 0, {}};
  std::mt19937_64 rng(seed);
  auto length = [&] { return std::uniform_int_distribution<std::size_t>(0, max_length)(rng); };
  for (std::size_t i = 0; i < samples; ++i) {
    GlobalWord const gw = random_global_word(s, length(), rng);
    Replay const g = exec_global(s, gw);
    if (!g.ok) {
      r.failures.push_back("generated global word is stuck: " + global_word_string(net, gw) + ": " + g.stuck);
    } else {
      LocalWord const lw = expand_delays(s, gw);
      Replay const l = exec_local(s, lw);
      if (!l.ok)
        r.failures.push_back("global word " + global_word_string(net, gw) + " stuck locally: " + l.stuck);
      else if (l.end() != local_of(s, g.end()) || l.q != g.q)
        r.failures.push_back("global word " + global_word_string(net, gw) + " ends elsewhere locally");
    }
    ++r.checked;

    LocalSample const ls = random_local_run(s, length(), rng);
    Replay const l = exec_local(s, ls.word);
    if (!l.ok) {
      r.failures.push_back("generated local word is stuck: " + local_word_string(net, ls.word) + ": " + l.stuck);
    } else {
      GlobalWord const gw2 = soon_global_word(ls);
      std::vector<Move> w;
      for (auto const & st : gw2.steps)
        w.push_back(st.move);
      auto const cls = trace_class(net, ls.moves);
      Replay const g2 = exec_global(s, gw2);
      auto const target = global_of(s, l.end());
      if (!std::binary_search(cls.begin(), cls.end(), w))
        r.failures.push_back("soon reordering of " + local_word_string(net, ls.word) + " is not trace equivalent");
      else if (!g2.ok)
        r.failures.push_back("local word " + local_word_string(net, ls.word) + " has no global counterpart: " +
                             g2.stuck);
      else if (!target || g2.end() != *target || g2.q != l.q)
        r.failures.push_back("local word " + local_word_string(net, ls.word) + " ends elsewhere globally");
    }
    ++r.checked;
  }
  return r;
}

/// Random local runs replay to the same end after swapping the blocks of two
/// adjacent independent moves.
inline CheckResult check_independence(Network const & net, std::size_t samples, std::uint64_t seed,
                                      std::size_t max_length = 5)
{
  ZoneSpaces const s(net);
  CheckResult r{"independence " + net.name(), 0, {}};
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    LocalSample const ls =
        random_local_run(s, std::uniform_int_distribution<std::size_t>(2, max_length)(rng), rng);
    Replay const base = exec_local(s, ls.word);
    if (!base.ok) {
      r.failures.push_back("generated local word is stuck: " + base.stuck);
      continue;
    }
    for (std::size_t k = 0; k + 1 < ls.moves.size(); ++k) {
      if (!net.independent(ls.moves[k].action, ls.moves[k + 1].action))
        continue;
      auto [b0, e0] = ls.blocks[k];
      auto [b1, e1] = ls.blocks[k + 1];
      LocalWord w(ls.word.begin(), ls.word.begin() + b0);
      w.insert(w.end(), ls.word.begin() + b1, ls.word.begin() + e1);
      w.insert(w.end(), ls.word.begin() + b0, ls.word.begin() + e0);
      w.insert(w.end(), ls.word.begin() + e1, ls.word.end());
      Replay const sw = exec_local(s, w);
      ++r.checked;
      if (!sw.ok || sw.end() != base.end() || sw.q != base.q)
        r.failures.push_back("swapping in " + local_word_string(net, ls.word) + " changes the run");
    }
  }
  return r;
}

// Zones against runs -----------------------------------------------------------

namespace detail {

/// Point of canonical zone `z` with some variables fixed to exact values and
/// others bounded above, or nullopt if no such point exists. Works on a copy
/// scaled by the common denominator so that all constants are integers.
inline std::optional<Point> point_with(Dbm const & z, std::vector<std::pair<VarIndex, Rational>> const & fixed,
                                       std::vector<std::pair<VarIndex, Rational>> const & below)
{
  std::int64_t scale = 2;
  for (auto const * list : {&fixed, &below})
    for (auto const & [x, v] : *list)
      scale = std::lcm(scale, v.den());
  Dbm d = Dbm::universal(z.layout());
  for (std::size_t i = 0; i < z.dim(); ++i) {
    for (std::size_t j = 0; j < z.dim(); ++j) {
      Bound const b = z.at(VarIndex{i}, VarIndex{j});
      if (!b.is_infinity())
        d.set(VarIndex{i}, VarIndex{j}, Bound::make(b.value() * scale, b.is_strict()));
    }
  }
  std::vector<DifferenceConstraint> cs;
  auto scaled = [&](Rational v) { return (v * Rational(scale)).num(); };
  for (auto const & [x, v] : fixed) {
    cs.push_back({x, zero_var, Bound::le(scaled(v))});
    cs.push_back({zero_var, x, Bound::le(-scaled(v))});
  }
  for (auto const & [x, v] : below)
    cs.push_back({x, zero_var, Bound::le(scaled(v))});
  auto c = constrain(std::move(d), cs);
  if (!c)
    return std::nullopt;
  PointBuilder b(*c);
  if (!b.complete())
    return std::nullopt;
  Point p = b.point();
  for (auto & v : p)
    v = v / Rational(scale);
  return p;
}

inline std::optional<Dbm> enabling_part(ZoneSpaces const & s, Dbm const & z, Move const & m)
{
  auto next = constrain(z, equal_refs(s, s.network().dom(m.action)));
  for (std::size_t k = 0; next && k < m.transitions.size(); ++k)
    next = constrain(std::move(*next), guard_local(s, move_transition(s.network(), m, k).guard));
  return next;
}

} // namespace detail

/// Local run along `u` from (q, z) whose valuation after the last move is
/// `target`, built backwards through the zone path. Returns the start
/// valuation and the word, or nullopt if some backward step finds no
/// predecessor.
inline std::optional<std::pair<Point, LocalWord>> concretize_backwards(ZoneSpaces const & s, StateVector const & q,
                                                                       Dbm const & z, std::vector<Move> const & u,
                                                                       Point const & target)
{
  auto const & net = s.network();
  std::vector<Dbm> zones{z};
  StateVector qq = q;
  for (Move const & m : u) {
    auto next = local_step(s, zones.back(), m);
    if (!next)
      return std::nullopt;
    zones.push_back(std::move(*next));
    qq = apply_move(net, qq, m);
  }
  std::vector<LocalWord> blocks(u.size());
  Point goal = target;
  for (std::size_t k = u.size(); k-- > 0;) {
    Move const & m = u[k];
    auto pre = detail::enabling_part(s, zones[k], m);
    if (!pre)
      return std::nullopt;
    std::vector<bool> reset(s.clock_count(), false);
    for (std::size_t i = 0; i < m.transitions.size(); ++i)
      for (ClockId x : move_transition(net, m, i).resets)
        reset[x] = true;
    std::vector<std::pair<VarIndex, Rational>> fixed, below;
    for (ClockId x = 0; x < s.clock_count(); ++x) {
      if (reset[x])
        fixed.emplace_back(s.local_owner_ref(x), goal[s.local_offset(x).value]);
      else
        fixed.emplace_back(s.local_offset(x), goal[s.local_offset(x).value]);
    }
    for (ProcessId p = 0; p < s.process_count(); ++p)
      below.emplace_back(s.local_ref(p), goal[s.local_ref(p).value]);
    auto from = detail::point_with(*pre, fixed, below);
    if (!from)
      return std::nullopt;
    blocks[k].push_back(m);
    for (ProcessId p = 0; p < s.process_count(); ++p) {
      Rational const d = goal[s.local_ref(p).value] - (*from)[s.local_ref(p).value];
      if (d != Rational(0))
        blocks[k].push_back(LocalDelay{p, d});
    }
    goal = std::move(*from);
  }
  LocalWord word;
  for (auto & b : blocks)
    word.insert(word.end(), b.begin(), b.end());
  return std::make_pair(goal, word);
}

/// Depth-first search for execution times completing a local run along `u`
/// from valuation `v`, trying half-integer times near the earliest admissible
/// one. The returned word has one block of delays then the move per action.
inline std::optional<LocalWord> concretize_forwards(ZoneSpaces const & s, StateVector const & q, Point const & v,
                                                    std::vector<Move> const & u, std::size_t budget = 20000)
{
  auto const & net = s.network();
  std::function<std::optional<LocalWord>(std::size_t, StateVector const &, Point const &)> go;
  go = [&](std::size_t k, StateVector const & qq, Point const & vv) -> std::optional<LocalWord> {
    if (k == u.size())
      return LocalWord{};
    if (budget == 0 || detail::discrete_problem(net, qq, u[k]))
      return std::nullopt;
    --budget;
    Move const & m = u[k];
    Interval const iv = detail::local_window(s, vv, m);
    if (iv.is_empty())
      return std::nullopt;
    std::vector<Rational> times;
    Rational const first = choose_in(iv);
    for (std::int64_t h = 0; h <= 6; ++h) {
      Rational const at = first + Rational(h, 2);
      if (iv.contains(at))
        times.push_back(at);
    }
    for (Rational const & at : times) {
      LocalWord block;
      for (ProcessId p : net.dom(m.action))
        block.push_back(LocalDelay{p, at - vv[s.local_ref(p).value]});
      block.push_back(m);
      Replay const r = exec_local(s, block, qq, vv);
      if (!r.ok)
        continue;
      if (auto rest = go(k + 1, r.q, r.end())) {
        block.insert(block.end(), rest->begin(), rest->end());
        return block;
      }
    }
    return std::nullopt;
  };
  return go(0, q, v);
}

/// Zone/run agreement on every path of length at most `depth` of the
/// unfolded local zone graph. Post: `samples` points of each end zone are
/// each reached by a concrete run from the start zone. Pre: for `samples`
/// points of the start zone, any run found along the path stays inside the
/// zone path. `pre_runs` counts the runs found for the pre direction.
struct AgreementCheck {
  CheckResult result;
  std::size_t pre_runs = 0;
};

inline AgreementCheck check_zone_run_agreement(Network const & net, std::size_t depth, std::size_t samples,
                                               std::uint64_t seed)
{
  ZoneSpaces const s(net);
  AgreementCheck out;
  out.result.name = "zone/run agreement " + net.name();
  std::mt19937_64 rng(seed);
  Dbm const z0 = initial_local_zone(s);
  StateVector const q0 = net.initial_state();
  for (auto const & path : explore_local_raw(net, depth)) {
    std::string const label = path.word.empty() ? std::string("<empty>") : witness_string(net, path.word);
    for (std::size_t i = 0; i < samples; ++i) {
      Point const goal = sample_point(path.zone, rng);
      auto back = concretize_backwards(s, q0, z0, path.word, goal);
      ++out.result.checked;
      if (!back) {
        out.result.failures.push_back("post: no predecessor run for " + label);
        continue;
      }
      Replay const r = exec_local(s, back->second, q0, back->first);
      if (!contains(z0, back->first) || !r.ok || r.end() != goal)
        out.result.failures.push_back("post: reconstructed run for " + label + " misses its target");
    }
    std::vector<Dbm> zones{z0};
    for (Move const & m : path.word)
      zones.push_back(*local_step(s, zones.back(), m));
    for (std::size_t i = 0; i < samples; ++i) {
      Point const start = sample_point(z0, rng);
      auto word = concretize_forwards(s, q0, start, path.word);
      if (!word)
        continue;
      ++out.pre_runs;
      ++out.result.checked;
      Replay const r = exec_local(s, *word, q0, start);
      std::size_t k = 0;
      bool inside = r.ok;
      for (std::size_t j = 0; inside && j < word->size(); ++j)
        if (std::holds_alternative<Move>((*word)[j]))
          inside = contains(zones[++k], r.trace[j + 1]);
      if (!inside)
        out.result.failures.push_back("pre: run along " + label + " leaves the zone path");
    }
  }
  return out;
}

// Region equivalence and maximization -----------------------------------------

/// Region-style equivalence of two local valuations with respect to `cmax`,
/// over all ordered pairs of references and offsets. The refined version also
/// requires integer differences to be matched by integer differences.
inline bool region_equiv(Point const & a, Point const & b, std::int64_t cmax, bool refined = true)
{
  if (a.size() != b.size())
    throw std::invalid_argument("valuations over different layouts");
  for (std::size_t i = 1; i < a.size(); ++i) {
    for (std::size_t j = 1; j < a.size(); ++j) {
      if (i == j)
        continue;
      Rational const da = a[i] - a[j], db = b[i] - b[j];
      std::int64_t const fa = da.floor(), fb = db.floor();
      if (fa > cmax && fb > cmax)
        continue;
      if (fa < -cmax && fb < -cmax)
        continue;
      if (fa != fb || (refined && da.is_integer() != db.is_integer()))
        return false;
    }
  }
  return true;
}

/// Widening of a canonical local zone: bounds above `cmax` are dropped and
/// bounds below `-cmax` become `< -cmax`, applied once, then closed again.
inline Dbm maximize_zone(Dbm z, std::int64_t cmax)
{
  for (std::size_t i = 0; i < z.dim(); ++i) {
    for (std::size_t j = 0; j < z.dim(); ++j) {
      if (i == j)
        continue;
      Bound const b = z.at(VarIndex{i}, VarIndex{j});
      if (b.is_infinity())
        continue;
      if (b.value() > cmax)
        z.set(VarIndex{i}, VarIndex{j}, Bound::infinity());
      else if (b.value() < -cmax)
        z.set(VarIndex{i}, VarIndex{j}, Bound::lt(-cmax));
    }
  }
  if (!z.tighten())
    throw std::logic_error("maximization produced an empty zone");
  return z;
}

/// Local zones maximized after every step, compared by plain inclusion.
struct MaximizedLocalSemantics {
  ZoneSpaces const & spaces;
  std::int64_t cmax;

  static constexpr char const * name = "maximized";

  Dbm initial() const { return maximize_zone(initial_local_zone(spaces), cmax); }
  std::optional<Dbm> step(Dbm const & z, Move const & mv) const
  {
    auto next = local_step(spaces, z, mv);
    if (!next)
      return std::nullopt;
    return maximize_zone(std::move(*next), cmax);
  }
  std::optional<Dbm> probe(Dbm const & z) const { return z; }
  std::optional<Dbm> abstraction(Dbm const & z) const { return z; }
};

struct FlawReport {
  Verdict local_sync = Verdict::unreachable;
  Verdict global = Verdict::unreachable;
  Verdict maximized = Verdict::unreachable;
  std::string target;
  std::string witness;
  std::vector<std::string> failures;

  bool pass() const { return failures.empty(); }
};

/// On the network where c needs P1 at time 4 and P2 at time 5, the exact
/// engines find p2 unreachable while the maximized local zone graph reaches
/// it through b1 b2 a1 c (up to trace equivalence).
inline FlawReport demo_minea_maximization_flaw()
{
  Network const net = parse_network(corpus::fig2);
  ZoneSpaces const s(net);
  FlawReport rep;
  rep.target = "P1=p2,P2=q3";
  TargetSpec const target = parse_target(net, rep.target);
  rep.local_sync = explore_local_sync(net, &target).verdict;
  rep.global = explore_global(net, &target).verdict;
  auto const m = explore(net, MaximizedLocalSemantics{s, max_constants(net).cmax.value_or(0)}, &target);
  rep.maximized = m.verdict;
  rep.witness = witness_string(net, m.witness);
  if (rep.local_sync != Verdict::unreachable)
    rep.failures.push_back("local sync graph reaches p2");
  if (rep.global != Verdict::unreachable)
    rep.failures.push_back("global zone graph reaches p2");
  if (rep.maximized != Verdict::reachable) {
    rep.failures.push_back("maximized graph does not reach p2");
  } else {
    auto const expected = resolve_word(net, "b1 b2 a1 c");
    auto const cls = trace_class(net, m.witness);
    if (!expected || !std::binary_search(cls.begin(), cls.end(), *expected))
      rep.failures.push_back("spurious witness " + rep.witness + " is not equivalent to b1 b2 a1 c");
  }
  return rep;
}

struct RegionReport {
  bool base_equivalent = false;
  std::vector<Rational> grid;
  std::vector<Rational> admissible;         // refined equivalence
  std::vector<Rational> admissible_literal; // floors only
  std::string layout;

  bool pass() const { return base_equivalent && admissible.empty(); }
};

/// Two processes with one clock each, cmax = 3. v1 and v2 differ only in
/// t2 (4 against 5) and are equivalent; after +_1 2 on v1, no delay d of
/// process 1 from v2 gives an equivalent valuation.
inline RegionReport demo_region_counterexample()
{
  Network const net = parse_network("system regions\nprocess P1\nprocess P2\nclock P1 x\nclock P2 y\n"
                                    "state P1 p0 initial\nstate P2 q0 initial\n");
  ZoneSpaces const s(net);
  std::int64_t const cmax = 3;
  auto valuation = [&](Rational t1, Rational t2) {
    Point v = initial_local_valuation(s);
    v[s.local_ref(0).value] = t1;
    v[s.local_ref(1).value] = t2;
    return v;
  };
  RegionReport rep;
  rep.layout = point_string(s.local_layout(), valuation(0, 4));
  rep.base_equivalent = region_equiv(valuation(0, 4), valuation(0, 5), cmax);
  Point const moved = valuation(2, 4);
  for (std::int64_t k = 0; k <= 16; ++k)
    rep.grid.push_back(Rational(k, 2));
  rep.grid.push_back(Rational(9));
  for (Rational const & d : rep.grid) {
    if (region_equiv(moved, valuation(d, 5), cmax))
      rep.admissible.push_back(d);
    if (region_equiv(moved, valuation(d, 5), cmax, false))
      rep.admissible_literal.push_back(d);
  }
  return rep;
}

// Suites -------------------------------------------------------------------------

inline std::vector<Network> corpus_networks()
{
  std::vector<Network> out;
  for (auto const & [name, text] : corpus::all())
    out.push_back(parse_network(text));
  return out;
}

/// Fig. 1 words ab and ba, Fig. 2 words up to length 4, then `count` random
/// acyclic networks with words up to length 5.
inline std::vector<CheckResult> aggregation_suite(std::size_t count, std::uint64_t seed)
{
  std::vector<CheckResult> out;
  {
    Network const net = parse_network(corpus::fig1);
    ZoneSpaces const s(net);
    CheckResult r{"aggregation fig1", 0, {}};
    for (char const * w : {"a b", "b a"}) {
      ++r.checked;
      auto u = resolve_word(net, w);
      auto c = check_aggregation_theorem(s, *u);
      if (!c.pass)
        r.failures.push_back(std::string(w) + ": " + c.failure);
    }
    out.push_back(std::move(r));
  }
  out.push_back(check_aggregation_words(parse_network(corpus::fig2), 4, "fig2"));
  out.push_back(check_aggregation_random(count, seed));
  return out;
}

/// Replay translation and independence on the corpus, `count` samples each.
inline std::vector<CheckResult> runs_suite(std::size_t count, std::uint64_t seed)
{
  std::vector<CheckResult> out;
  if (count == 0)
    return out;
  for (auto const & net : corpus_networks()) {
    out.push_back(check_run_translation(net, count, seed));
    out.push_back(check_independence(net, count, seed));
  }
  return out;
}

inline std::vector<CheckResult> flaws_suite()
{
  std::vector<CheckResult> out;
  FlawReport const f = demo_minea_maximization_flaw();
  out.push_back({"maximization flaw", 1, f.failures});
  RegionReport const r = demo_region_counterexample();
  CheckResult rc{"region counterexample", r.grid.size() + 1, {}};
  if (!r.base_equivalent)
    rc.failures.push_back("v1 and v2 are not equivalent");
  for (Rational const & d : r.admissible)
    rc.failures.push_back("delay " + d.to_string() + " gives an equivalent successor");
  out.push_back(std::move(rc));
  return out;
}

} // namespace lzg
