#pragma once

#include <chrono>
#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "lzg/model.hh"
#include "lzg/zones.hh"

namespace lzg {

/// Successor of a global node along `m`: guard, reset, then time elapse.
inline std::optional<Dbm> global_step(ZoneSpaces const & s, Dbm const & z, Move const & m)
{
  auto const & net = s.network();
  Dbm next = z;
  for (std::size_t k = 0; k < m.transitions.size(); ++k)
    for (auto const & c : guard_global(s, move_transition(net, m, k).guard))
      if (!next.constrain_in_place(c.i, c.j, c.bound))
        return std::nullopt;
  for (std::size_t k = 0; k < m.transitions.size(); ++k)
    next = apply_reset_global(s, std::move(next), move_transition(net, m, k).resets);
  return elapse(std::move(next));
}

/// Successor of a local node along `m`: the processes of dom(action) are
/// synchronized, guards intersected, clocks reset, then local time elapses.
inline std::optional<Dbm> local_step(ZoneSpaces const & s, Dbm const & z, Move const & m)
{
  auto const & net = s.network();
  auto next = constrain(z, equal_refs(s, net.dom(m.action)));
  if (!next)
    return std::nullopt;
  for (std::size_t k = 0; k < m.transitions.size(); ++k)
    for (auto const & c : guard_local(s, move_transition(net, m, k).guard))
      if (!next->constrain_in_place(c.i, c.j, c.bound))
        return std::nullopt;
  Dbm out = std::move(*next);
  for (std::size_t k = 0; k < m.transitions.size(); ++k)
    out = apply_reset_local(s, std::move(out), move_transition(net, m, k).resets);
  return local_elapse(s, std::move(out));
}

/// Global zones; subsumption is inclusion in the extrapolated clock zone.
struct GlobalSemantics {
  ZoneSpaces const & spaces;
  MaxConstants m;

  static constexpr char const * name = "global";

  Dbm initial() const { return initial_global_zone(spaces); }
  std::optional<Dbm> step(Dbm const & z, Move const & mv) const { return global_step(spaces, z, mv); }
  std::optional<Dbm> probe(Dbm const & z) const { return to_clock_zone(spaces, z); }
  std::optional<Dbm> abstraction(Dbm const & z) const { return extra_m(to_clock_zone(spaces, z), m); }
};

/// Local zones; subsumption acts on the synchronized part only.
struct LocalSyncSemantics {
  ZoneSpaces const & spaces;
  MaxConstants m;

  static constexpr char const * name = "local";

  Dbm initial() const { return initial_local_zone(spaces); }
  std::optional<Dbm> step(Dbm const & z, Move const & mv) const { return local_step(spaces, z, mv); }
  std::optional<Dbm> probe(Dbm const & z) const { return sync_clock_zone(spaces, z); }
  std::optional<Dbm> abstraction(Dbm const & z) const
  {
    auto c = sync_clock_zone(spaces, z);
    if (!c)
      return std::nullopt;
    return extra_m(std::move(*c), m);
  }
};

struct SearchOptions {
  bool exhaustive = false;
  bool retro_cover = true;
  std::optional<double> timeout_seconds{};
};

enum class Verdict { reachable, unreachable, timeout };

inline std::string_view to_string(Verdict v)
{
  switch (v) {
  case Verdict::reachable:
    return "reachable";
  case Verdict::unreachable:
    return "unreachable";
  case Verdict::timeout:
    return "timeout";
  }
  return "?";
}

struct SearchStats {
  std::size_t visited = 0;
  std::size_t stored = 0;
  std::size_t frontier_max = 0;
  double seconds = 0;
};

struct GraphNode {
  StateVector q;
  Dbm zone;
  std::optional<std::size_t> parent;
  std::optional<Move> via;
  std::optional<std::size_t> covered_by;
  bool expanded = false;
  /// Covered after its successors had been generated (retro-cover).
  bool covered_after_expansion = false;
};

/// Successor edge. `to` is the new node, or the stored node that absorbed a
/// successor zone (`absorbed` then tells whether the zones differed).
struct GraphEdge {
  std::size_t from;
  Move move;
  std::size_t to;
  bool absorbed = false;
  bool subsumed = false;
};

struct SearchResult {
  std::string engine;
  Verdict verdict = Verdict::unreachable;
  std::optional<std::size_t> target_node;
  std::vector<Move> witness;
  SearchStats stats;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
};

/// Breadth-first search with subsumption over any zone semantics providing
/// initial(), step(), probe() and abstraction(). A successor is dropped when
/// its probe lies inside the abstraction of an uncovered stored node with the
/// same state vector; with retro-cover, stored nodes whose probe lies inside
/// the newcomer's abstraction are marked covered and leave the frontier.
template <class Semantics>
SearchResult explore(Network const & net, Semantics const & sem, TargetSpec const * target,
                     SearchOptions const & opt = {})
{
  using clock = std::chrono::steady_clock;
  auto const start = clock::now();
  SearchResult res;
  res.engine = Semantics::name;
  std::vector<std::optional<Dbm>> probes;
  std::vector<std::optional<Dbm>> abstractions;
  std::unordered_map<StateVector, std::vector<std::size_t>, StateVectorHash> store;
  std::deque<std::size_t> frontier;

  auto covers = [&](std::size_t coverer, std::optional<Dbm> const & probe) {
    if (!probe)
      return true;
    return abstractions[coverer].has_value() && includes(*abstractions[coverer], *probe);
  };

  auto add_node = [&](StateVector q, Dbm zone, std::optional<std::size_t> parent, std::optional<Move> via) {
    std::size_t const id = res.nodes.size();
    probes.push_back(sem.probe(zone));
    abstractions.push_back(sem.abstraction(zone));
    store[q].push_back(id);
    res.nodes.push_back({std::move(q), std::move(zone), parent, std::move(via), std::nullopt, false, false});
    frontier.push_back(id);
    ++res.stats.stored;
    res.stats.frontier_max = std::max(res.stats.frontier_max, frontier.size());
    return id;
  };

  auto hit = [&](std::size_t id) {
    if (res.target_node || target == nullptr || !target->matches(res.nodes[id].q))
      return false;
    res.target_node = id;
    res.verdict = Verdict::reachable;
    return !opt.exhaustive;
  };

  auto finish = [&]() {
    if (res.target_node) {
      for (std::size_t id = *res.target_node; res.nodes[id].parent; id = *res.nodes[id].parent)
        res.witness.insert(res.witness.begin(), *res.nodes[id].via);
    }
    res.stats.seconds = std::chrono::duration<double>(clock::now() - start).count();
    return std::move(res);
  };

  ++res.stats.visited;
  if (hit(add_node(net.initial_state(), sem.initial(), std::nullopt, std::nullopt)))
    return finish();

  std::size_t tick = 0;
  while (!frontier.empty()) {
    if (opt.timeout_seconds && (++tick & 63) == 0 &&
        std::chrono::duration<double>(clock::now() - start).count() > *opt.timeout_seconds) {
      if (!res.target_node)
        res.verdict = Verdict::timeout;
      return finish();
    }
    std::size_t const id = frontier.front();
    frontier.pop_front();
    if (res.nodes[id].covered_by)
      continue;
    res.nodes[id].expanded = true;
    StateVector const q = res.nodes[id].q;
    for (Move const & mv : enabled_moves(net, q)) {
      auto next = sem.step(res.nodes[id].zone, mv);
      if (!next)
        continue;
      ++res.stats.visited;
      StateVector q2 = apply_move(net, q, mv);
      auto & bucket = store[q2];
      std::optional<std::size_t> absorber;
      bool equal = false;
      for (std::size_t j : bucket) {
        if (!res.nodes[j].covered_by && res.nodes[j].zone == *next) {
          absorber = j;
          equal = true;
          break;
        }
      }
      std::optional<Dbm> probe;
      if (!absorber) {
        probe = sem.probe(*next);
        for (std::size_t j : bucket) {
          if (!res.nodes[j].covered_by && covers(j, probe)) {
            absorber = j;
            break;
          }
        }
      }
      if (absorber) {
        res.edges.push_back({id, mv, *absorber, true, !equal});
        continue;
      }
      std::vector<std::size_t> const earlier = bucket;
      std::size_t const n = add_node(std::move(q2), std::move(*next), id, mv);
      res.edges.push_back({id, mv, n, false, false});
      if (opt.retro_cover) {
        for (std::size_t j : earlier) {
          if (!res.nodes[j].covered_by && covers(n, probes[j])) {
            res.nodes[j].covered_by = n;
            res.nodes[j].covered_after_expansion = res.nodes[j].expanded;
          }
        }
      }
      if (hit(n))
        return finish();
    }
  }
  return finish();
}

inline SearchResult explore_global(Network const & net, TargetSpec const * target, SearchOptions const & opt = {})
{
  ZoneSpaces const spaces(net);
  return explore(net, GlobalSemantics{spaces, max_constants(net)}, target, opt);
}

inline SearchResult explore_local_sync(Network const & net, TargetSpec const * target,
                                       SearchOptions const & opt = {})
{
  ZoneSpaces const spaces(net);
  return explore(net, LocalSyncSemantics{spaces, max_constants(net)}, target, opt);
}

struct UnfoldedPath {
  std::vector<Move> word;
  StateVector q;
  Dbm zone;
};

/// Every path of the local zone graph of length at most `depth`, without any
/// subsumption, in depth-first order.
inline std::vector<UnfoldedPath> explore_local_raw(Network const & net, std::size_t depth)
{
  ZoneSpaces const s(net);
  std::vector<UnfoldedPath> out;
  out.push_back({{}, net.initial_state(), initial_local_zone(s)});
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].word.size() >= depth)
      continue;
    for (Move const & mv : enabled_moves(net, out[i].q)) {
      auto next = local_step(s, out[i].zone, mv);
      if (!next)
        continue;
      UnfoldedPath p{out[i].word, apply_move(net, out[i].q, mv), std::move(*next)};
      p.word.push_back(mv);
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Structural check of a finished local sync graph. Returns one message per
/// violated condition; empty means the graph is well formed. Nodes covered
/// after their expansion are reported only when `allow_expanded_covered` is
/// false.
template <class Semantics>
std::vector<std::string> audit_graph(Network const & net, Semantics const & sem, SearchResult const & g,
                                     bool allow_expanded_covered = true)
{
  std::vector<std::string> issues;
  if (g.nodes.empty())
    return {"graph has no root"};
  if (g.nodes[0].covered_by || g.nodes[0].q != net.initial_state() || !(g.nodes[0].zone == sem.initial()))
    issues.push_back("root is not the uncovered initial node");
  std::vector<std::vector<std::size_t>> children(g.nodes.size());
  for (auto const & e : g.edges)
    if (!e.absorbed)
      children[e.from].push_back(e.to);

  auto subsumed_by = [&](Dbm const & zone, std::size_t coverer) {
    auto probe = sem.probe(zone);
    auto abs = sem.abstraction(g.nodes[coverer].zone);
    return !probe || (abs && includes(*abs, *probe));
  };
  auto has_uncovered_coverer = [&](StateVector const & q, Dbm const & zone) {
    for (std::size_t j = 0; j < g.nodes.size(); ++j)
      if (!g.nodes[j].covered_by && g.nodes[j].q == q && subsumed_by(zone, j))
        return true;
    return false;
  };

  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    auto const & n = g.nodes[i];
    if (i > 0 && (!n.parent || *n.parent >= i))
      issues.push_back("node " + std::to_string(i) + " not reachable through parent edges");
    if (n.covered_by) {
      if (!children[i].empty() && !(allow_expanded_covered && n.covered_after_expansion))
        issues.push_back("covered node " + std::to_string(i) + " has successors");
      if (!has_uncovered_coverer(n.q, n.zone))
        issues.push_back("covered node " + std::to_string(i) + " has no uncovered coverer");
      continue;
    }
    // Every successor must be present, either as a child or absorbed by an
    // uncovered node.
    for (Move const & mv : enabled_moves(net, n.q)) {
      auto next = sem.step(n.zone, mv);
      if (!next)
        continue;
      StateVector q2 = apply_move(net, n.q, mv);
      if (!has_uncovered_coverer(q2, *next)) {
        bool found = false;
        for (std::size_t c : children[i])
          if (g.nodes[c].q == q2 && g.nodes[c].zone == *next)
            found = true;
        if (!found)
          issues.push_back("successor of node " + std::to_string(i) + " by " + net.move_string(mv) + " missing");
      }
    }
  }
  return issues;
}

inline std::string escape_dot(std::string const & s)
{
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    out += c;
  }
  return out;
}

/// GraphViz rendering of a search graph. Covered nodes are dashed and carry a
/// dashed "covered-by" edge; successors absorbed by a different stored zone
/// are dotted.
inline std::string export_dot(Network const & net, SearchResult const & g)
{
  std::ostringstream os;
  os << "digraph zone_graph {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    auto const & n = g.nodes[i];
    std::string label = net.state_string(n.q);
    for (auto const & c : n.zone.constraint_strings())
      label += "\\n" + escape_dot(c);
    os << "  n" << i << " [label=\"" << label << "\"";
    if (n.covered_by)
      os << ", style=dashed";
    os << "];\n";
  }
  for (auto const & e : g.edges) {
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << escape_dot(net.move_string(e.move)) << "\"";
    if (e.subsumed)
      os << ", style=dotted";
    os << "];\n";
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].covered_by)
      os << "  n" << i << " -> n" << *g.nodes[i].covered_by << " [label=\"covered-by\", style=dashed];\n";
  os << "}\n";
  return os.str();
}

inline std::string witness_string(Network const & net, std::vector<Move> const & word)
{
  std::string s;
  for (std::size_t i = 0; i < word.size(); ++i)
    s += (i ? " " : "") + net.move_string(word[i]);
  return s;
}

} // namespace lzg
