#pragma once

#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lzg/explore.hh"

namespace lzg {

enum class Family { parallel, fischer, dining, corsso, critical };

inline std::vector<Family> all_families()
{
  return {Family::parallel, Family::fischer, Family::dining, Family::corsso, Family::critical};
}

inline std::string_view to_string(Family f)
{
  switch (f) {
  case Family::parallel:
    return "parallel";
  case Family::fischer:
    return "fischer";
  case Family::dining:
    return "dining";
  case Family::corsso:
    return "corsso";
  case Family::critical:
    return "critical";
  }
  return "?";
}

inline std::optional<Family> family_from_string(std::string_view s)
{
  for (Family f : all_families())
    if (to_string(f) == s)
      return f;
  return std::nullopt;
}

struct BenchSpec {
  Family family = Family::parallel;
  std::size_t size = 2;
};

/// A generated instance: model text plus the target to check.
struct BenchModel {
  std::string name;
  std::string text;
  std::string target;
};

namespace detail {

inline std::string idx(std::string const & base, std::size_t i) { return base + std::to_string(i); }

class ModelWriter {
public:
  explicit ModelWriter(std::string const & name) { os_ << "system " << name << "\n"; }

  void comment(std::string const & text)
  {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
      os_ << "#" << (line.empty() ? "" : " ") << line << "\n";
  }
  void process(std::string const & p) { os_ << "process " << p << "\n"; }
  void clock(std::string const & p, std::string const & c) { os_ << "clock " << p << " " << c << "\n"; }
  void state(std::string const & p, std::string const & s, bool initial = false)
  {
    os_ << "state " << p << " " << s << (initial ? " initial" : "") << "\n";
  }
  void trans(std::string const & p, std::string const & from, std::string const & to, std::string const & action,
             std::string const & guard = "", std::string const & reset = "")
  {
    os_ << "trans " << p << " " << from << " " << to << " " << action;
    if (!guard.empty())
      os_ << " guard{" << guard << "}";
    if (!reset.empty())
      os_ << " reset{" << reset << "}";
    os_ << "\n";
  }
  std::string str() const { return os_.str(); }

private:
  std::ostringstream os_;
};

// n clients and one lock. A client does one timed local step, then acquires
// the lock and releases it within 2 time units. The local steps of different
// clients are independent, which is where the local semantics saves
// interleavings.
inline BenchModel parallel(std::size_t n)
{
  std::string const name = "parallel" + std::to_string(n);
  ModelWriter w(name);
  w.comment("Parallel: n clients compete for a resource held by a lock automaton.\n"
            "A client works on its own for at least 1 time unit, acquires the lock,\n"
            "keeps it for at most 2 time units, then starts over.\n"
            "Target: two clients in the critical section (unreachable).");
  w.process("Lock");
  for (std::size_t i = 1; i <= n; ++i)
    w.process(idx("C", i));
  for (std::size_t i = 1; i <= n; ++i)
    w.clock(idx("C", i), idx("x", i));
  w.state("Lock", "free", true);
  for (std::size_t i = 1; i <= n; ++i)
    w.state("Lock", idx("held", i));
  for (std::size_t i = 1; i <= n; ++i) {
    std::string const c = idx("C", i), x = idx("x", i);
    std::string const idle = idx("idle", i), ready = idx("ready", i), cs = idx("cs", i);
    w.state(c, idle, true);
    w.state(c, ready);
    w.state(c, cs);
    w.trans(c, idle, ready, idx("work", i), x + ">=1", x);
    w.trans(c, ready, cs, idx("acquire", i), "", x);
    w.trans(c, cs, idle, idx("release", i), x + "<=2", x);
    w.trans("Lock", "free", idx("held", i), idx("acquire", i));
    w.trans("Lock", idx("held", i), "free", idx("release", i));
  }
  return {name, w.str(), "C1=cs1,C2=cs2"};
}

// Fischer's protocol. The shared variable id is the automaton Id with one
// state per value; every step of a process reads or writes it, so every
// action involves Id.
inline BenchModel fischer(std::size_t n)
{
  std::string const name = "fischer" + std::to_string(n);
  ModelWriter w(name);
  w.comment("Fischer: n processes, one clock each, delay bound k = 2.\n"
            "The shared variable id is the automaton Id (state idj means id = j).\n"
            "Target: two processes in the critical section (unreachable).");
  w.process("Id");
  for (std::size_t i = 1; i <= n; ++i)
    w.process(idx("P", i));
  for (std::size_t i = 1; i <= n; ++i)
    w.clock(idx("P", i), idx("x", i));
  for (std::size_t j = 0; j <= n; ++j)
    w.state("Id", idx("id", j), j == 0);
  for (std::size_t i = 1; i <= n; ++i) {
    std::string const p = idx("P", i), x = idx("x", i);
    std::string const idle = idx("idle", i), req = idx("req", i), wait = idx("wait", i), cs = idx("cs", i);
    w.state(p, idle, true);
    w.state(p, req);
    w.state(p, wait);
    w.state(p, cs);
    w.trans(p, idle, req, idx("try", i), "", x);
    w.trans("Id", "id0", "id0", idx("try", i));
    w.trans(p, req, wait, idx("set", i), x + "<=2", x);
    for (std::size_t j = 0; j <= n; ++j)
      w.trans("Id", idx("id", j), idx("id", i), idx("set", i));
    w.trans(p, wait, cs, idx("enter", i), x + ">2");
    w.trans("Id", idx("id", i), idx("id", i), idx("enter", i));
    w.trans(p, wait, idle, idx("retry", i));
    for (std::size_t j = 0; j <= n; ++j)
      if (j != i)
        w.trans("Id", idx("id", j), idx("id", j), idx("retry", i));
    w.trans(p, cs, idle, idx("exit", i));
    for (std::size_t j = 0; j <= n; ++j)
      w.trans("Id", idx("id", j), "id0", idx("exit", i));
  }
  return {name, w.str(), "P1=cs1,P2=cs2"};
}

// Dining philosophers with timeout: a philosopher who holds her left fork
// and cannot take the right one within 2 time units puts the left one back.
inline BenchModel dining(std::size_t n)
{
  std::string const name = "dining" + std::to_string(n);
  ModelWriter w(name);
  w.comment("Dining philosophers: n philosophers, n forks. Philosopher i takes fork i\n"
            "(left), then fork i+1 (right) within 2 time units, or releases fork i\n"
            "after more than 2 time units. Eating lasts at least 1 time unit.\n"
            "Target: neighbours 1 and 2 eating together (unreachable).");
  for (std::size_t i = 1; i <= n; ++i)
    w.process(idx("Phil", i));
  for (std::size_t i = 1; i <= n; ++i)
    w.process(idx("Fork", i));
  for (std::size_t i = 1; i <= n; ++i)
    w.clock(idx("Phil", i), idx("x", i));
  for (std::size_t i = 1; i <= n; ++i) {
    std::string const p = idx("Phil", i);
    w.state(p, idx("think", i), true);
    w.state(p, idx("left", i));
    w.state(p, idx("eat", i));
  }
  for (std::size_t i = 1; i <= n; ++i) {
    w.state(idx("Fork", i), idx("free", i), true);
    w.state(idx("Fork", i), idx("taken", i));
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::string const p = idx("Phil", i), x = idx("x", i);
    std::size_t const r = i % n + 1;
    std::string const left = idx("Fork", i), right = idx("Fork", r);
    std::string const think = idx("think", i), holding = idx("left", i), eat = idx("eat", i);
    w.trans(p, think, holding, idx("take_left", i), "", x);
    w.trans(left, idx("free", i), idx("taken", i), idx("take_left", i));
    w.trans(p, holding, eat, idx("take_right", i), x + "<=2", x);
    w.trans(right, idx("free", r), idx("taken", r), idx("take_right", i));
    w.trans(p, holding, think, idx("give_up", i), x + ">2");
    w.trans(left, idx("taken", i), idx("free", i), idx("give_up", i));
    w.trans(p, eat, think, idx("put_down", i), x + ">=1", x);
    w.trans(left, idx("taken", i), idx("free", i), idx("put_down", i));
    w.trans(right, idx("taken", r), idx("free", r), idx("put_down", i));
  }
  return {name, w.str(), "Phil1=eat1,Phil2=eat2"};
}

// Single sign-on in the style of CorSSO: a client must authenticate with
// each of n servers in turn. Each server independently refreshes its
// credentials on a timer between requests.
inline BenchModel corsso(std::size_t n)
{
  std::string const name = "corsso" + std::to_string(n);
  ModelWriter w(name);
  w.comment("CorSSO-style authentication: one client, n servers. The client asks\n"
            "each server in order; a server answers between 1 and 3 time units after\n"
            "the request. Servers refresh their keys on their own every 2 to 4 time\n"
            "units while idle. Target: the client holds all n answers (reachable).");
  w.process("Client");
  for (std::size_t i = 1; i <= n; ++i)
    w.process(idx("Srv", i));
  w.clock("Client", "c");
  for (std::size_t i = 1; i <= n; ++i)
    w.clock(idx("Srv", i), idx("y", i));
  for (std::size_t i = 0; i <= n; ++i)
    w.state("Client", idx("asked", i), i == 0);
  for (std::size_t i = 1; i <= n; ++i)
    w.state("Client", idx("waiting", i));
  for (std::size_t i = 1; i <= n; ++i) {
    std::string const s = idx("Srv", i), y = idx("y", i);
    std::string const idle = idx("sidle", i), busy = idx("busy", i), done = idx("done", i);
    w.state(s, idle, true);
    w.state(s, busy);
    w.state(s, done);
    w.trans(s, idle, idle, idx("refresh", i), y + ">=2 && " + y + "<=4", y);
    w.trans("Client", idx("asked", i - 1), idx("waiting", i), idx("request", i), "", "c");
    w.trans(s, idle, busy, idx("request", i), "", y);
    w.trans("Client", idx("waiting", i), idx("asked", i), idx("answer", i), "c<=3");
    w.trans(s, busy, done, idx("answer", i), y + ">=1");
  }
  return {name, w.str(), "Client=" + idx("asked", n)};
}

// Critical region with a round-robin arbiter: the arbiter grants the region
// to process i, then passes the turn on. Processes prepare locally and in
// parallel.
inline BenchModel critical(std::size_t n)
{
  std::string const name = "critical" + std::to_string(n);
  ModelWriter w(name);
  w.comment("Critical region: n processes and a round-robin arbiter. Process i\n"
            "prepares locally (at least 1 time unit), enters when the arbiter is at\n"
            "turn i, and leaves within 2 time units, passing the turn to i+1.\n"
            "Target: processes 1 and 2 both inside (unreachable).");
  w.process("Arbiter");
  for (std::size_t i = 1; i <= n; ++i)
    w.process(idx("P", i));
  for (std::size_t i = 1; i <= n; ++i)
    w.clock(idx("P", i), idx("x", i));
  for (std::size_t i = 1; i <= n; ++i)
    w.state("Arbiter", idx("turn", i), i == 1);
  for (std::size_t i = 1; i <= n; ++i) {
    std::string const p = idx("P", i), x = idx("x", i);
    std::string const idle = idx("idle", i), ready = idx("ready", i), cs = idx("cs", i);
    w.state(p, idle, true);
    w.state(p, ready);
    w.state(p, cs);
    w.trans(p, idle, ready, idx("prepare", i), x + ">=1", x);
    w.trans(p, ready, cs, idx("enter", i), "", x);
    w.trans("Arbiter", idx("turn", i), idx("turn", i), idx("enter", i));
    w.trans(p, cs, idle, idx("leave", i), x + "<=2", x);
    w.trans("Arbiter", idx("turn", i), idx("turn", i % n + 1), idx("leave", i));
  }
  return {name, w.str(), "P1=cs1,P2=cs2"};
}

} // namespace detail

inline BenchModel generate(BenchSpec const & spec)
{
  if (spec.size < 2)
    throw std::invalid_argument("benchmark size must be at least 2");
  switch (spec.family) {
  case Family::parallel:
    return detail::parallel(spec.size);
  case Family::fischer:
    return detail::fischer(spec.size);
  case Family::dining:
    return detail::dining(spec.size);
  case Family::corsso:
    return detail::corsso(spec.size);
  case Family::critical:
    return detail::critical(spec.size);
  }
  throw std::invalid_argument("unknown family");
}

struct BenchRow {
  std::string model;
  Family family = Family::parallel;
  std::size_t size = 0;
  std::string engine;
  Verdict verdict = Verdict::unreachable;
  SearchStats stats;
};

using BenchReport = std::vector<BenchRow>;

/// Runs both engines on every instance. A timeout is recorded as such.
template <class Progress>
BenchReport run_suite(std::vector<BenchSpec> const & specs, double timeout_seconds, Progress progress)
{
  BenchReport out;
  for (auto const & spec : specs) {
    BenchModel const m = generate(spec);
    Network const net = parse_network(m.text);
    TargetSpec const target = parse_target(net, m.target);
    SearchOptions opt;
    opt.timeout_seconds = timeout_seconds;
    for (int engine = 0; engine < 2; ++engine) {
      SearchResult const r = engine == 0 ? explore_global(net, &target, opt) : explore_local_sync(net, &target, opt);
      out.push_back({m.name, spec.family, spec.size, r.engine, r.verdict, r.stats});
      progress(out.back());
    }
  }
  return out;
}

inline BenchReport run_suite(std::vector<BenchSpec> const & specs, double timeout_seconds)
{
  return run_suite(specs, timeout_seconds, [](BenchRow const &) {});
}

/// Table with one line per instance: verdict and counts of both engines.
inline std::string render_table(BenchReport const & rep)
{
  std::vector<std::vector<std::string>> rows{
      {"model", "verdict", "global visited", "global stored", "global s", "local visited", "local stored", "local s"}};
  auto secs = [](double s) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << s;
    return os.str();
  };
  for (std::size_t i = 0; i + 1 < rep.size(); i += 2) {
    auto const & g = rep[i];
    auto const & l = rep[i + 1];
    std::string verdict(to_string(g.verdict));
    if (g.verdict != l.verdict)
      verdict += "/" + std::string(to_string(l.verdict));
    rows.push_back({g.model, verdict, std::to_string(g.stats.visited), std::to_string(g.stats.stored),
                    secs(g.stats.seconds), std::to_string(l.stats.visited), std::to_string(l.stats.stored),
                    secs(l.stats.seconds)});
  }
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (auto const & r : rows)
    for (std::size_t c = 0; c < r.size(); ++c)
      width[c] = std::max(width[c], r[c].size());
  std::ostringstream os;
  for (auto const & r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c == 0)
        os << std::left << std::setw(static_cast<int>(width[c])) << r[c];
      else
        os << "  " << std::right << std::setw(static_cast<int>(width[c])) << r[c];
    }
    os << "\n";
  }
  return os.str();
}

} // namespace lzg
