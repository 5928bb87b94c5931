#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lzg {

using ProcessId = std::size_t;
using ClockId = std::size_t;
using StateId = std::size_t;
using ActionId = std::size_t;

enum class Relation { lt, le, eq, ge, gt };

inline std::string_view to_string(Relation r)
{
  switch (r) {
  case Relation::lt:
    return "<";
  case Relation::le:
    return "<=";
  case Relation::eq:
    return "==";
  case Relation::ge:
    return ">=";
  case Relation::gt:
    return ">";
  }
  return "?";
}

/// Clock constraint `clock rel constant`.
struct Atom {
  ClockId clock = 0;
  Relation rel = Relation::le;
  std::int64_t constant = 0;

  friend bool operator==(Atom const &, Atom const &) = default;
};

/// Conjunction of atoms; empty means `true`.
struct Guard {
  std::vector<Atom> atoms;

  friend bool operator==(Guard const &, Guard const &) = default;
};

struct Transition {
  StateId source = 0;
  StateId target = 0;
  ActionId action = 0;
  Guard guard;
  std::vector<ClockId> resets;

  friend bool operator==(Transition const &, Transition const &) = default;
};

struct Process {
  std::string name;
  std::vector<std::string> states;
  StateId initial = 0;
  std::vector<ClockId> clocks;
  std::vector<Transition> transitions;

  friend bool operator==(Process const &, Process const &) = default;
};

struct ClockInfo {
  std::string name;
  ProcessId owner = 0;

  friend bool operator==(ClockInfo const &, ClockInfo const &) = default;
};

/// One state per process, in process order.
using StateVector = std::vector<StateId>;

struct StateVectorHash {
  std::size_t operator()(StateVector const & q) const noexcept
  {
    std::size_t h = q.size();
    for (StateId s : q)
      h = h * 31u + s + 0x9e3779b9u;
    return h;
  }
};

/// A synchronized action step: one transition per process of dom(action), in
/// the order of Network::dom(action). Entries index Process::transitions.
struct Move {
  ActionId action = 0;
  std::vector<std::size_t> transitions;

  friend bool operator==(Move const &, Move const &) = default;
  friend auto operator<=>(Move const &, Move const &) = default;
};

/// Error raised while reading a model. Syntax errors concern the shape of a
/// line; validation errors concern names and ownership.
class ParseError : public std::runtime_error {
public:
  enum class Kind { syntax, validation };

  ParseError(Kind kind, std::size_t line, std::size_t column, std::string const & message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), kind_(kind),
        line_(line), column_(column), message_(message)
  {
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  std::string const & message() const noexcept { return message_; }

private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// Network of timed automata. Immutable once built by parse_network.
class Network {
public:
  std::string const & name() const noexcept { return name_; }
  std::vector<Process> const & processes() const noexcept { return processes_; }
  Process const & process(ProcessId p) const { return processes_.at(p); }
  std::size_t process_count() const noexcept { return processes_.size(); }

  std::vector<ClockInfo> const & clocks() const noexcept { return clocks_; }
  std::size_t clock_count() const noexcept { return clocks_.size(); }

  std::vector<std::string> const & actions() const noexcept { return actions_; }
  std::size_t action_count() const noexcept { return actions_.size(); }
  std::string const & action_name(ActionId a) const { return actions_.at(a); }

  /// Processes that must take part in action `a`, increasing.
  std::vector<ProcessId> const & dom(ActionId a) const { return dom_.at(a); }

  bool independent(ActionId a, ActionId b) const
  {
    auto const & da = dom(a);
    auto const & db = dom(b);
    for (ProcessId p : da)
      if (std::find(db.begin(), db.end(), p) != db.end())
        return false;
    return true;
  }

  std::optional<ProcessId> find_process(std::string_view n) const
  {
    for (ProcessId p = 0; p < processes_.size(); ++p)
      if (processes_[p].name == n)
        return p;
    return std::nullopt;
  }

  std::optional<ClockId> find_clock(std::string_view n) const
  {
    for (ClockId c = 0; c < clocks_.size(); ++c)
      if (clocks_[c].name == n)
        return c;
    return std::nullopt;
  }

  std::optional<ActionId> find_action(std::string_view n) const
  {
    for (ActionId a = 0; a < actions_.size(); ++a)
      if (actions_[a] == n)
        return a;
    return std::nullopt;
  }

  std::optional<StateId> find_state(ProcessId p, std::string_view n) const
  {
    auto const & states = process(p).states;
    for (StateId s = 0; s < states.size(); ++s)
      if (states[s] == n)
        return s;
    return std::nullopt;
  }

  StateVector initial_state() const
  {
    StateVector q;
    for (auto const & p : processes_)
      q.push_back(p.initial);
    return q;
  }

  /// Action domains recomputed from the transition alphabets.
  std::vector<std::vector<ProcessId>> derive_dom() const
  {
    std::vector<std::vector<ProcessId>> dom(actions_.size());
    for (ProcessId p = 0; p < processes_.size(); ++p)
      for (auto const & t : processes_[p].transitions)
        if (dom[t.action].empty() || dom[t.action].back() != p)
          dom[t.action].push_back(p);
    return dom;
  }

  std::string state_string(StateVector const & q) const
  {
    std::string s = "<";
    for (ProcessId p = 0; p < q.size(); ++p)
      s += (p ? "," : "") + processes_[p].states.at(q[p]);
    return s + ">";
  }

  std::string move_string(Move const & m) const
  {
    std::string s = actions_.at(m.action);
    if (!m.transitions.empty() && has_parallel_edges_[m.action]) {
      s += "[";
      for (std::size_t k = 0; k < m.transitions.size(); ++k)
        s += (k ? "," : "") + std::to_string(m.transitions[k]);
      s += "]";
    }
    return s;
  }

  friend bool operator==(Network const & a, Network const & b)
  {
    return a.name_ == b.name_ && a.processes_ == b.processes_ && a.clocks_ == b.clocks_ &&
           a.actions_ == b.actions_ && a.dom_ == b.dom_;
  }

private:
  friend Network parse_network(std::string_view text);

  void finalize()
  {
    dom_ = derive_dom();
    has_parallel_edges_.assign(actions_.size(), false);
    for (auto const & proc : processes_)
      for (std::size_t i = 0; i < proc.transitions.size(); ++i)
        for (std::size_t j = i + 1; j < proc.transitions.size(); ++j)
          if (proc.transitions[i].action == proc.transitions[j].action &&
              proc.transitions[i].source == proc.transitions[j].source)
            has_parallel_edges_[proc.transitions[i].action] = true;
  }

  std::string name_;
  std::vector<Process> processes_;
  std::vector<ClockInfo> clocks_;
  std::vector<std::string> actions_;
  std::vector<std::vector<ProcessId>> dom_;
  std::vector<bool> has_parallel_edges_;
};

namespace detail {

inline bool is_identifier(std::string_view s)
{
  if (s.empty())
    return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; });
}

struct Token {
  std::string text;
  std::size_t column;
};

/// Cursor over one source line; columns are 1-based.
class LineReader {
public:
  LineReader(std::string_view line, std::size_t number) : line_(line), number_(number) {}

  std::size_t column() const { return pos_ + 1; }
  std::size_t line() const { return number_; }

  void skip_space()
  {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_])) != 0)
      ++pos_;
  }

  bool at_end()
  {
    skip_space();
    return pos_ >= line_.size();
  }

  bool peek_word(std::string_view w)
  {
    skip_space();
    return line_.substr(pos_, w.size()) == w;
  }

  bool accept(std::string_view w)
  {
    if (!peek_word(w))
      return false;
    pos_ += w.size();
    return true;
  }

  void expect(std::string_view w)
  {
    if (!accept(w))
      fail("expected '" + std::string(w) + "'");
  }

  Token identifier(std::string_view what)
  {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < line_.size() &&
           (std::isalnum(static_cast<unsigned char>(line_[pos_])) != 0 || line_[pos_] == '_'))
      ++pos_;
    if (start == pos_)
      fail("expected " + std::string(what));
    return {std::string(line_.substr(start, pos_ - start)), start + 1};
  }

  std::int64_t natural()
  {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[pos_])) != 0)
      ++pos_;
    if (start == pos_)
      fail("expected a natural number");
    std::string digits(line_.substr(start, pos_ - start));
    if (digits.size() > 12)
      fail("constant too large");
    return std::stoll(digits);
  }

  Relation relation()
  {
    skip_space();
    for (auto [text, rel] : {std::pair{"<=", Relation::le}, std::pair{">=", Relation::ge},
                             std::pair{"==", Relation::eq}, std::pair{"<", Relation::lt},
                             std::pair{">", Relation::gt}}) {
      if (accept(text))
        return rel;
    }
    fail("expected a comparison operator");
  }

  [[noreturn]] void fail(std::string const & message) const
  {
    throw ParseError(ParseError::Kind::syntax, number_, pos_ + 1, message);
  }

private:
  std::string_view line_;
  std::size_t number_;
  std::size_t pos_ = 0;
};

struct RawAtom {
  Token clock;
  Relation rel;
  std::int64_t constant;
};

struct RawTransition {
  std::size_t line;
  Token process, source, target, action;
  std::vector<RawAtom> guard;
  std::vector<Token> resets;
};

[[noreturn]] inline void invalid(std::size_t line, std::size_t column, std::string const & message)
{
  throw ParseError(ParseError::Kind::validation, line, column, message);
}

} // namespace detail

/// Reads a network in the line-oriented model language:
///
///     system <id>
///     process <id>
///     clock <process> <id>
///     state <process> <id> [initial]
///     trans <process> <src> <tgt> <action> [guard{x<=2 && y>1}] [reset{x,y}]
///
/// `#` starts a comment. Clock and state names are global and owned by one
/// process. The alphabet of a process is the set of actions on its transitions.
inline Network parse_network(std::string_view text)
{
  using detail::invalid;
  using detail::LineReader;
  using detail::Token;

  Network net;
  std::vector<detail::RawTransition> raw_transitions;
  std::map<std::string, std::size_t> state_owner;
  std::vector<bool> has_initial;
  bool seen_system = false;

  auto lookup_process = [&](Token const & tok, std::size_t line) -> ProcessId {
    auto p = net.find_process(tok.text);
    if (!p)
      invalid(line, tok.column, "unknown process " + tok.text);
    return *p;
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos)
      end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);

    LineReader in(line, line_no);
    if (in.at_end())
      continue;
    Token keyword = in.identifier("a keyword");
    if (keyword.text == "system") {
      Token id = in.identifier("system name");
      if (seen_system)
        invalid(line_no, keyword.column, "duplicate system declaration");
      seen_system = true;
      net.name_ = id.text;
    }
    else if (keyword.text == "process") {
      Token id = in.identifier("process name");
      if (net.find_process(id.text))
        invalid(line_no, id.column, "duplicate process " + id.text);
      Process p;
      p.name = id.text;
      net.processes_.push_back(std::move(p));
      has_initial.push_back(false);
    }
    else if (keyword.text == "clock") {
      Token proc = in.identifier("process name");
      Token id = in.identifier("clock name");
      if (!in.at_end())
        in.fail("unexpected text after clock declaration");
      ProcessId p = lookup_process(proc, line_no);
      if (net.find_clock(id.text))
        invalid(line_no, id.column, "duplicate clock " + id.text);
      net.clocks_.push_back({id.text, p});
      net.processes_[p].clocks.push_back(net.clocks_.size() - 1);
      continue;
    }
    else if (keyword.text == "state") {
      Token proc = in.identifier("process name");
      Token id = in.identifier("state name");
      bool initial = false;
      if (!in.at_end()) {
        Token flag = in.identifier("'initial'");
        if (flag.text != "initial")
          in.fail("expected 'initial' or end of line");
        initial = true;
      }
      ProcessId p = lookup_process(proc, line_no);
      if (state_owner.count(id.text) != 0)
        invalid(line_no, id.column, "duplicate state " + id.text);
      state_owner[id.text] = p;
      auto & process = net.processes_[p];
      process.states.push_back(id.text);
      if (initial) {
        if (has_initial[p])
          invalid(line_no, id.column, "process " + process.name + " has several initial states");
        has_initial[p] = true;
        process.initial = process.states.size() - 1;
      }
    }
    else if (keyword.text == "trans") {
      detail::RawTransition t;
      t.line = line_no;
      t.process = in.identifier("process name");
      t.source = in.identifier("source state");
      t.target = in.identifier("target state");
      t.action = in.identifier("action name");
      if (in.accept("guard")) {
        in.expect("{");
        if (!in.peek_word("}")) {
          do {
            Token clock = in.identifier("clock name");
            Relation rel = in.relation();
            std::int64_t c = in.natural();
            t.guard.push_back({clock, rel, c});
          } while (in.accept("&&"));
        }
        in.expect("}");
      }
      if (in.accept("reset")) {
        in.expect("{");
        if (!in.peek_word("}")) {
          do {
            t.resets.push_back(in.identifier("clock name"));
          } while (in.accept(","));
        }
        in.expect("}");
      }
      raw_transitions.push_back(std::move(t));
    }
    else {
      throw ParseError(ParseError::Kind::syntax, line_no, keyword.column, "unknown keyword " + keyword.text);
    }
    if (!in.at_end())
      in.fail("unexpected text at end of line");
  }

  if (net.processes_.empty())
    invalid(line_no, 1, "network declares no process");
  for (ProcessId p = 0; p < net.processes_.size(); ++p) {
    if (net.processes_[p].states.empty())
      invalid(line_no, 1, "process " + net.processes_[p].name + " has no state");
    if (!has_initial[p])
      invalid(line_no, 1, "process " + net.processes_[p].name + " has no initial state");
  }

  for (auto const & raw : raw_transitions) {
    ProcessId p = lookup_process(raw.process, raw.line);
    auto & process = net.processes_[p];
    auto state = [&](Token const & tok) {
      auto s = net.find_state(p, tok.text);
      if (!s)
        invalid(raw.line, tok.column, "state " + tok.text + " not owned by process " + process.name);
      return *s;
    };
    auto clock = [&](Token const & tok) {
      auto c = net.find_clock(tok.text);
      if (!c)
        invalid(raw.line, tok.column, "unknown clock " + tok.text);
      if (net.clocks_[*c].owner != p)
        invalid(raw.line, tok.column, "clock " + tok.text + " not owned by process " + process.name);
      return *c;
    };
    Transition t;
    t.source = state(raw.source);
    t.target = state(raw.target);
    auto action = net.find_action(raw.action.text);
    if (!action) {
      net.actions_.push_back(raw.action.text);
      action = net.actions_.size() - 1;
    }
    t.action = *action;
    for (auto const & a : raw.guard)
      t.guard.atoms.push_back({clock(a.clock), a.rel, a.constant});
    for (auto const & r : raw.resets) {
      ClockId c = clock(r);
      if (std::find(t.resets.begin(), t.resets.end(), c) != t.resets.end())
        invalid(raw.line, r.column, "clock " + r.text + " reset twice");
      t.resets.push_back(c);
    }
    process.transitions.push_back(std::move(t));
  }

  if (net.name_.empty())
    net.name_ = "network";
  net.finalize();
  return net;
}

/// Model text that parse_network reads back into an equal network.
inline std::string print_network(Network const & net)
{
  std::ostringstream os;
  os << "system " << net.name() << "\n";
  for (auto const & p : net.processes())
    os << "process " << p.name << "\n";
  for (auto const & c : net.clocks())
    os << "clock " << net.process(c.owner).name << " " << c.name << "\n";
  for (auto const & p : net.processes())
    for (StateId s = 0; s < p.states.size(); ++s)
      os << "state " << p.name << " " << p.states[s] << (s == p.initial ? " initial" : "") << "\n";
  for (auto const & p : net.processes()) {
    for (auto const & t : p.transitions) {
      os << "trans " << p.name << " " << p.states[t.source] << " " << p.states[t.target] << " "
         << net.action_name(t.action);
      if (!t.guard.atoms.empty()) {
        os << " guard{";
        for (std::size_t i = 0; i < t.guard.atoms.size(); ++i) {
          auto const & a = t.guard.atoms[i];
          os << (i ? " && " : "") << net.clocks()[a.clock].name << to_string(a.rel) << a.constant;
        }
        os << "}";
      }
      if (!t.resets.empty()) {
        os << " reset{";
        for (std::size_t i = 0; i < t.resets.size(); ++i)
          os << (i ? "," : "") << net.clocks()[t.resets[i]].name;
        os << "}";
      }
      os << "\n";
    }
  }
  return os.str();
}

/// Partial map from processes to required states.
struct TargetSpec {
  std::vector<std::pair<ProcessId, StateId>> required;

  bool matches(StateVector const & q) const
  {
    return std::all_of(required.begin(), required.end(), [&](auto const & r) { return q[r.first] == r.second; });
  }
};

/// Parses `P1=s1,P2=s2`. Syntax problems and unknown names both raise
/// ParseError (line 1, column of the offending pair).
inline TargetSpec parse_target(Network const & net, std::string_view text)
{
  TargetSpec spec;
  std::size_t pos = 0;
  if (text.empty())
    throw ParseError(ParseError::Kind::syntax, 1, 1, "empty target");
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos)
      comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || !detail::is_identifier(item.substr(0, eq)) ||
        !detail::is_identifier(item.substr(eq + 1)))
      throw ParseError(ParseError::Kind::syntax, 1, pos + 1, "expected <process>=<state>");
    auto p = net.find_process(item.substr(0, eq));
    if (!p)
      throw ParseError(ParseError::Kind::validation, 1, pos + 1,
                       "unknown process " + std::string(item.substr(0, eq)));
    auto s = net.find_state(*p, item.substr(eq + 1));
    if (!s)
      throw ParseError(ParseError::Kind::validation, 1, pos + eq + 2,
                       "state " + std::string(item.substr(eq + 1)) + " not owned by process " +
                           net.process(*p).name);
    spec.required.emplace_back(*p, *s);
    pos = comma + 1;
  }
  return spec;
}

/// Largest constant compared with each clock; std::nullopt stands for minus
/// infinity (clock never compared).
struct MaxConstants {
  std::vector<std::optional<std::int64_t>> per_clock;
  std::optional<std::int64_t> cmax;

  std::optional<std::int64_t> of(ClockId x) const { return per_clock.at(x); }
};

inline MaxConstants max_constants(Network const & net)
{
  MaxConstants m;
  m.per_clock.assign(net.clock_count(), std::nullopt);
  for (auto const & p : net.processes()) {
    for (auto const & t : p.transitions) {
      for (auto const & a : t.guard.atoms) {
        auto & slot = m.per_clock[a.clock];
        slot = std::max(slot.value_or(a.constant), a.constant);
        m.cmax = std::max(m.cmax.value_or(a.constant), a.constant);
      }
    }
  }
  return m;
}

/// Every way of executing action `b` from `q`: the Cartesian product of the
/// b-transitions leaving q(p) for each p in dom(b), in declaration order.
inline std::vector<Move> enabled_sync_sets(Network const & net, StateVector const & q, ActionId b)
{
  if (b >= net.action_count())
    throw std::invalid_argument("unknown action id");
  auto const & dom = net.dom(b);
  std::vector<std::vector<std::size_t>> choices(dom.size());
  for (std::size_t k = 0; k < dom.size(); ++k) {
    auto const & proc = net.process(dom[k]);
    for (std::size_t t = 0; t < proc.transitions.size(); ++t)
      if (proc.transitions[t].action == b && proc.transitions[t].source == q[dom[k]])
        choices[k].push_back(t);
    if (choices[k].empty())
      return {};
  }
  std::vector<Move> moves;
  std::vector<std::size_t> pick(dom.size(), 0);
  while (true) {
    Move m{b, {}};
    for (std::size_t k = 0; k < dom.size(); ++k)
      m.transitions.push_back(choices[k][pick[k]]);
    moves.push_back(std::move(m));
    std::size_t k = dom.size();
    while (k > 0) {
      --k;
      if (++pick[k] < choices[k].size())
        break;
      pick[k] = 0;
      if (k == 0)
        return moves;
    }
    if (dom.empty())
      return moves;
  }
}

/// All moves enabled from `q` (ignoring clocks) in exploration order: actions
/// sorted by the first process of their domain and then by the declaration
/// position of that process's first transition on the action.
inline std::vector<Move> enabled_moves(Network const & net, StateVector const & q)
{
  std::vector<Move> moves;
  std::vector<bool> done(net.action_count(), false);
  for (ProcessId p = 0; p < net.process_count(); ++p) {
    for (auto const & t : net.process(p).transitions) {
      if (done[t.action] || t.source != q[p] || net.dom(t.action).front() != p)
        continue;
      done[t.action] = true;
      auto ms = enabled_sync_sets(net, q, t.action);
      moves.insert(moves.end(), ms.begin(), ms.end());
    }
  }
  return moves;
}

/// Discrete effect of a move (no enabledness check beyond sources).
inline StateVector apply_move(Network const & net, StateVector q, Move const & m)
{
  auto const & dom = net.dom(m.action);
  for (std::size_t k = 0; k < dom.size(); ++k) {
    auto const & t = net.process(dom[k]).transitions.at(m.transitions[k]);
    if (q[dom[k]] != t.source)
      throw std::invalid_argument("move not enabled in state");
    q[dom[k]] = t.target;
  }
  return q;
}

/// Transition of process dom(m.action)[k] used by a move.
inline Transition const & move_transition(Network const & net, Move const & m, std::size_t k)
{
  return net.process(net.dom(m.action)[k]).transitions.at(m.transitions[k]);
}

inline std::string read_text_file(std::string const & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace lzg
