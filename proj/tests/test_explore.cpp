#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "lzg/explore.hh"

using namespace lzg;

namespace {

Network load(std::string const & name)
{
  return parse_network(read_text_file(std::string(LZG_MODELS_DIR) + "/" + name));
}

struct C {
  std::string a, b;
  Bound bound;
};

/// Zone given by constraints `a - b <| c` over named variables ("0" is zero).
Dbm zone_of(LayoutPtr const & layout, std::vector<C> const & cs)
{
  Dbm d = Dbm::universal(layout);
  for (auto const & c : cs) {
    auto i = layout->find(c.a);
    auto j = layout->find(c.b);
    EXPECT_TRUE(i && j) << c.a << " " << c.b;
    d.set(*i, *j, min(d.at(*i, *j), c.bound));
  }
  auto z = canonicalize(d);
  EXPECT_TRUE(z);
  return *z;
}

Bound le0 = Bound::le_zero();

Move move_of(Network const & net, StateVector const & q, std::string const & action)
{
  auto moves = enabled_sync_sets(net, q, *net.find_action(action));
  EXPECT_EQ(moves.size(), 1u);
  return moves.at(0);
}

std::vector<Dbm> zones_at(SearchResult const & r, StateVector const & q)
{
  std::vector<Dbm> out;
  for (auto const & n : r.nodes)
    if (n.q == q)
      out.push_back(n.zone);
  return out;
}

std::vector<Network> corpus()
{
  std::vector<Network> nets;
  for (auto const & entry : std::filesystem::directory_iterator(LZG_MODELS_DIR))
    nets.push_back(parse_network(read_text_file(entry.path().string())));
  return nets;
}

} // namespace

TEST(GlobalStep, SeparateResetsOrderTheOffsets)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  auto const & g = s.global_layout();
  Dbm root = initial_global_zone(s);
  auto za = global_step(s, root, move_of(net, net.initial_state(), "a"));
  ASSERT_TRUE(za);
  EXPECT_EQ(*za, zone_of(g, {{"~x", "t", le0}, {"~y", "~x", le0}, {"~y", "0", le0}, {"0", "~y", le0}}));
  auto zb = global_step(s, root, move_of(net, net.initial_state(), "b"));
  ASSERT_TRUE(zb);
  EXPECT_EQ(*zb, zone_of(g, {{"~y", "t", le0}, {"~x", "~y", le0}, {"~x", "0", le0}, {"0", "~x", le0}}));
}

TEST(GlobalStep, UnsatisfiableGuardGivesNothing)
{
  Network net = parse_network("process P\nclock P x\nstate P a initial\nstate P b\nstate P c\n"
                              "trans P a b go guard{x>2}\ntrans P b c late guard{x==2}\n");
  ZoneSpaces s(net);
  auto first = global_step(s, initial_global_zone(s), Move{0, {0}});
  ASSERT_TRUE(first);
  EXPECT_FALSE(global_step(s, *first, Move{1, {1}}));
}

TEST(LocalStep, OnlyTheActingProcessMoves)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  auto const & l = s.local_layout();
  Dbm root = initial_local_zone(s);
  auto za = local_step(s, root, move_of(net, net.initial_state(), "a"));
  ASSERT_TRUE(za);
  EXPECT_EQ(*za, zone_of(l, {{"~x", "t_P1", le0}, {"0", "~x", le0}, {"~y", "t_P2", le0}, {"~y", "0", le0},
                             {"0", "~y", le0}}));
}

TEST(LocalStep, BothOrdersGiveTheSameZone)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  Dbm root = initial_local_zone(s);
  StateVector q0 = net.initial_state();
  Move a = move_of(net, q0, "a"), b = move_of(net, q0, "b");
  auto ab = local_step(s, *local_step(s, root, a), b);
  auto ba = local_step(s, *local_step(s, root, b), a);
  ASSERT_TRUE(ab && ba);
  EXPECT_EQ(*ab, *ba);
  EXPECT_EQ(*ab, zone_of(s.local_layout(), {{"~x", "t_P1", le0}, {"0", "~x", le0}, {"~y", "t_P2", le0},
                                            {"0", "~y", le0}}));
}

TEST(LocalStep, SynchronizationFailsWhenTimesCannotMeet)
{
  Network net = load("fig2.ta");
  ZoneSpaces s(net);
  Dbm z = initial_local_zone(s);
  StateVector q = net.initial_state();
  for (std::string a : {"b1", "b2", "a1"}) {
    Move m = move_of(net, q, a);
    auto next = local_step(s, z, m);
    ASSERT_TRUE(next) << a;
    z = *next;
    q = apply_move(net, q, m);
  }
  // ~x - ~y = 2 and ~z - ~y = 5 here
  auto const & l = s.local_layout();
  EXPECT_EQ(z.at(*l->find("~x"), *l->find("~y")), Bound::le(2));
  EXPECT_EQ(z.at(*l->find("~z"), *l->find("~y")), Bound::le(5));
  EXPECT_FALSE(local_step(s, z, move_of(net, q, "c")));
}

TEST(ExploreGlobal, FigureOneStoresFiveNodes)
{
  Network net = load("fig1.ta");
  TargetSpec target = parse_target(net, "P1=p1,P2=q1");
  SearchResult r = explore_global(net, &target, {.exhaustive = true});
  EXPECT_EQ(r.verdict, Verdict::reachable);
  EXPECT_EQ(r.stats.stored, 5u);
  EXPECT_EQ(r.stats.visited, 5u);
  ZoneSpaces s(net);
  auto const & g = s.global_layout();
  StateVector both{1, 1};
  auto leaves = zones_at(r, both);
  ASSERT_EQ(leaves.size(), 2u);
  Dbm after_ab = zone_of(g, {{"~y", "t", le0}, {"~x", "~y", le0}, {"0", "~x", le0}});
  Dbm after_ba = zone_of(g, {{"~x", "t", le0}, {"~y", "~x", le0}, {"0", "~y", le0}});
  EXPECT_TRUE((leaves[0] == after_ab && leaves[1] == after_ba) || (leaves[0] == after_ba && leaves[1] == after_ab));
  ASSERT_EQ(r.witness.size(), 2u);
}

TEST(ExploreLocal, FigureOneStoresFourNodes)
{
  Network net = load("fig1.ta");
  TargetSpec target = parse_target(net, "P1=p1,P2=q1");
  SearchResult r = explore_local_sync(net, &target, {.exhaustive = true});
  EXPECT_EQ(r.verdict, Verdict::reachable);
  EXPECT_EQ(r.stats.stored, 4u);
  auto leaves = zones_at(r, StateVector{1, 1});
  ASSERT_EQ(leaves.size(), 1u);
  ZoneSpaces s(net);
  EXPECT_EQ(leaves[0], zone_of(s.local_layout(),
                               {{"~x", "t_P1", le0}, {"0", "~x", le0}, {"~y", "t_P2", le0}, {"0", "~y", le0}}));
  EXPECT_EQ(r.edges.size(), 4u);
}

TEST(Explore, FigureTwoTargetIsUnreachableForBothEngines)
{
  Network net = load("fig2.ta");
  TargetSpec target = parse_target(net, "P1=p2");
  EXPECT_EQ(explore_global(net, &target).verdict, Verdict::unreachable);
  EXPECT_EQ(explore_local_sync(net, &target).verdict, Verdict::unreachable);
}

TEST(Explore, EarlyStopUnlessExhaustive)
{
  Network net = load("fig1.ta");
  TargetSpec target = parse_target(net, "P1=p1");
  SearchResult r = explore_global(net, &target);
  EXPECT_EQ(r.verdict, Verdict::reachable);
  EXPECT_LT(r.stats.stored, 5u);
  ASSERT_EQ(r.witness.size(), 1u);
  EXPECT_EQ(net.action_name(r.witness[0].action), "a");
}

TEST(Explore, ResetLoopTerminates)
{
  Network net = parse_network("process P\nclock P x\nstate P s initial\nstate P u\n"
                              "trans P s u go\ntrans P u s back reset{x}\n");
  SearchResult g = explore_global(net, nullptr);
  SearchResult l = explore_local_sync(net, nullptr);
  EXPECT_LE(g.stats.stored, 4u);
  EXPECT_LE(l.stats.stored, 4u);
  EXPECT_EQ(g.verdict, Verdict::unreachable);
}

TEST(Explore, CounterLoopTerminatesThroughExtrapolation)
{
  // Without extrapolation every lap would give a new zone.
  Network net = parse_network("process P\nclock P x\nclock P y\nstate P s initial\n"
                              "trans P s s tick guard{x==1} reset{x}\n"
                              "process Q\nclock Q z\nstate Q r initial\ntrans Q r r tock guard{z<=3}\n");
  SearchResult g = explore_global(net, nullptr);
  SearchResult l = explore_local_sync(net, nullptr);
  EXPECT_LT(g.stats.stored, 50u);
  EXPECT_LT(l.stats.stored, 50u);
  EXPECT_LE(l.stats.stored, g.stats.stored);
}

TEST(Explore, TimeoutIsReportedAsSuch)
{
  std::string text = "system big\n";
  for (int p = 0; p < 7; ++p) {
    std::string P = "P" + std::to_string(p);
    text += "process " + P + "\nclock " + P + " x" + std::to_string(p) + "\n";
    for (int s = 0; s < 6; ++s)
      text += "state " + P + " s" + std::to_string(p) + "_" + std::to_string(s) + (s == 0 ? " initial\n" : "\n");
    for (int s = 0; s < 6; ++s)
      text += "trans " + P + " s" + std::to_string(p) + "_" + std::to_string(s) + " s" + std::to_string(p) + "_" +
              std::to_string((s + 1) % 6) + " a" + std::to_string(p) + "_" + std::to_string(s) + " guard{x" +
              std::to_string(p) + "<=" + std::to_string(s + 1) + "} reset{x" + std::to_string(p) + "}\n";
  }
  Network net = parse_network(text);
  SearchResult r = explore_global(net, nullptr, {.timeout_seconds = 0.0});
  EXPECT_EQ(r.verdict, Verdict::timeout);
}

TEST(Explore, VerdictParityAndReductionOnCorpus)
{
  for (Network const & net : corpus()) {
    for (ProcessId p = 0; p < net.process_count(); ++p) {
      for (StateId st = 0; st < net.process(p).states.size(); ++st) {
        TargetSpec t{{{p, st}}};
        SearchResult g = explore_global(net, &t);
        SearchResult l = explore_local_sync(net, &t);
        EXPECT_EQ(g.verdict, l.verdict) << net.name() << " " << net.process(p).states[st];
      }
    }
    SearchResult g = explore_global(net, nullptr);
    SearchResult l = explore_local_sync(net, nullptr);
    EXPECT_LE(l.stats.stored, g.stats.stored) << net.name();
  }
}

TEST(Explore, GraphsSatisfyStructuralConditions)
{
  for (Network const & net : corpus()) {
    ZoneSpaces s(net);
    for (bool retro : {true, false}) {
      SearchResult l = explore_local_sync(net, nullptr, {.retro_cover = retro});
      auto issues = audit_graph(net, LocalSyncSemantics{s, max_constants(net)}, l, retro);
      EXPECT_TRUE(issues.empty()) << net.name() << ": " << (issues.empty() ? "" : issues.front());
      SearchResult g = explore_global(net, nullptr, {.retro_cover = retro});
      issues = audit_graph(net, GlobalSemantics{s, max_constants(net)}, g, retro);
      EXPECT_TRUE(issues.empty()) << net.name() << ": " << (issues.empty() ? "" : issues.front());
    }
  }
}

TEST(Explore, RetroCoverMarksSmallerStoredZones)
{
  // Two ways into `m`: a late one first (smaller zone), then an early one.
  Network net = parse_network("process P\nclock P x\nstate P s initial\nstate P k\nstate P m\n"
                              "trans P s m slow guard{x>=2}\ntrans P s k hop\ntrans P k m fast\n");
  SearchResult r = explore_global(net, nullptr, {.exhaustive = true});
  std::size_t covered = 0;
  for (auto const & n : r.nodes)
    covered += n.covered_by ? 1 : 0;
  EXPECT_EQ(covered, 1u);
  SearchResult strict = explore_global(net, nullptr, {.exhaustive = true, .retro_cover = false});
  for (auto const & n : strict.nodes)
    EXPECT_FALSE(n.covered_by);
  std::string dot = export_dot(net, r);
  std::size_t dashed_nodes = 0;
  for (std::size_t pos = dot.find("style=dashed]"); pos != std::string::npos;
       pos = dot.find("style=dashed]", pos + 1))
    ++dashed_nodes;
  // one dashed node plus its dashed covered-by edge
  EXPECT_EQ(dashed_nodes, 2u);
  EXPECT_NE(dot.find("covered-by"), std::string::npos);
}

TEST(Dot, FigureOneLocalGraph)
{
  Network net = load("fig1.ta");
  SearchResult r = explore_local_sync(net, nullptr, {.exhaustive = true});
  std::string dot = export_dot(net, r);
  std::size_t nodes = 0, edges = 0;
  std::istringstream in(dot);
  for (std::string line; std::getline(in, line);) {
    if (line.find("->") != std::string::npos)
      ++edges;
    else if (line.rfind("  n", 0) == 0 && std::isdigit(static_cast<unsigned char>(line[3])) != 0)
      ++nodes;
  }
  EXPECT_EQ(nodes, 4u);
  EXPECT_EQ(edges, 4u);
  EXPECT_EQ(dot.find("dashed"), std::string::npos);
  EXPECT_EQ(dot.rfind("digraph", 0), 0u);
}

TEST(Dot, SingleNodeGraph)
{
  Network net = parse_network("process P\nstate P s initial\n");
  std::string dot = export_dot(net, explore_global(net, nullptr));
  EXPECT_NE(dot.find("n0 [label=\"<s>"), std::string::npos);
  EXPECT_EQ(dot.back(), '\n');
}

TEST(Unfold, FigureOneDepthTwo)
{
  Network net = load("fig1.ta");
  auto paths = explore_local_raw(net, 2);
  ASSERT_EQ(paths.size(), 5u);
  std::map<std::string, Dbm> by_word;
  for (auto const & p : paths)
    by_word.emplace(witness_string(net, p.word), p.zone);
  EXPECT_EQ(by_word.count(""), 1u);
  EXPECT_EQ(by_word.at("a b"), by_word.at("b a"));
  EXPECT_EQ(explore_local_raw(net, 0).size(), 1u);
}

TEST(Unfold, FigureTwoDepthThree)
{
  Network net = load("fig2.ta");
  std::set<std::string> words;
  for (auto const & p : explore_local_raw(net, 3))
    words.insert(witness_string(net, p.word));
  EXPECT_EQ(words.count("b1 b2 a1"), 1u);
  EXPECT_EQ(words.count("b1 b2 c"), 0u);
}

TEST(Unfold, IndependentActionsCommute)
{
  for (Network const & net : corpus()) {
    auto paths = explore_local_raw(net, 4);
    std::map<std::vector<Move>, std::size_t> index;
    for (std::size_t i = 0; i < paths.size(); ++i)
      index[paths[i].word] = i;
    for (auto const & p : paths) {
      for (std::size_t k = 0; k + 1 < p.word.size(); ++k) {
        if (!net.independent(p.word[k].action, p.word[k + 1].action))
          continue;
        auto swapped = p.word;
        std::swap(swapped[k], swapped[k + 1]);
        auto it = index.find(swapped);
        ASSERT_NE(it, index.end()) << net.name() << ": " << witness_string(net, swapped);
        EXPECT_EQ(paths[it->second].zone, p.zone);
        EXPECT_EQ(paths[it->second].q, p.q);
      }
    }
  }
}
