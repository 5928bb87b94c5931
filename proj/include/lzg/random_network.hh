#pragma once

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lzg {

struct RandomNetworkParams {
  std::size_t min_processes = 2;
  std::size_t max_processes = 3;
  std::size_t max_transitions = 6; // per process
  std::size_t max_clocks = 2;      // per process
  std::int64_t max_constant = 4;
  std::size_t shared_actions = 2;
};

/// Model text of a random acyclic network. Every transition goes from a lower
/// to a higher numbered state. Shared actions are placed in at least two
/// processes; the remaining transitions carry actions private to their
/// process.
template <class Rng>
std::string random_acyclic_network(Rng & rng, RandomNetworkParams const & prm = {}, std::string const & name = "random")
{
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  std::size_t const k = pick(prm.min_processes, prm.max_processes);
  struct Edge {
    std::size_t from, to;
    std::string action;
  };
  std::vector<std::size_t> state_count(k);
  std::vector<std::size_t> clock_count(k);
  std::vector<std::vector<Edge>> edges(k);

  for (std::size_t p = 0; p < k; ++p) {
    state_count[p] = pick(2, 4);
    clock_count[p] = pick(1, prm.max_clocks);
  }
  auto random_edge = [&](std::size_t p) {
    std::size_t from = pick(0, state_count[p] - 2);
    return Edge{from, pick(from + 1, state_count[p] - 1), {}};
  };
  for (std::size_t a = 0; a < prm.shared_actions; ++a) {
    std::vector<std::size_t> procs(k);
    for (std::size_t p = 0; p < k; ++p)
      procs[p] = p;
    std::shuffle(procs.begin(), procs.end(), rng);
    procs.resize(pick(2, k));
    for (std::size_t p : procs) {
      Edge e = random_edge(p);
      e.action = "s" + std::to_string(a);
      edges[p].push_back(e);
    }
  }
  for (std::size_t p = 0; p < k; ++p) {
    std::size_t const target = pick(std::max<std::size_t>(edges[p].size(), 1), prm.max_transitions);
    while (edges[p].size() < target) {
      Edge e = random_edge(p);
      e.action = "l" + std::to_string(p) + "_" + std::to_string(edges[p].size());
      edges[p].push_back(e);
    }
    std::shuffle(edges[p].begin(), edges[p].end(), rng);
  }

  static constexpr char const * relations[] = {"<", "<=", "==", ">=", ">"};
  std::ostringstream os;
  os << "system " << name << "\n";
  for (std::size_t p = 0; p < k; ++p)
    os << "process P" << p << "\n";
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t c = 0; c < clock_count[p]; ++c)
      os << "clock P" << p << " x" << p << "_" << c << "\n";
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t s = 0; s < state_count[p]; ++s)
      os << "state P" << p << " q" << p << "_" << s << (s == 0 ? " initial" : "") << "\n";
  for (std::size_t p = 0; p < k; ++p) {
    for (auto const & e : edges[p]) {
      os << "trans P" << p << " q" << p << "_" << e.from << " q" << p << "_" << e.to << " " << e.action;
      std::size_t const atoms = pick(0, 2);
      if (atoms > 0) {
        os << " guard{";
        for (std::size_t i = 0; i < atoms; ++i) {
          os << (i ? " && " : "") << "x" << p << "_" << pick(0, clock_count[p] - 1)
             << relations[pick(0, 4)]
             << std::uniform_int_distribution<std::int64_t>(0, prm.max_constant)(rng);
        }
        os << "}";
      }
      std::vector<std::size_t> resets;
      for (std::size_t c = 0; c < clock_count[p]; ++c)
        if (coin(0.4))
          resets.push_back(c);
      if (!resets.empty()) {
        os << " reset{";
        for (std::size_t i = 0; i < resets.size(); ++i)
          os << (i ? "," : "") << "x" << p << "_" << resets[i];
        os << "}";
      }
      os << "\n";
    }
  }
  return os.str();
}

} // namespace lzg
