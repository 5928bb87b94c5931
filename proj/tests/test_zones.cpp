#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "lzg/explore.hh"
#include "lzg/point.hh"
#include "lzg/zones.hh"
#include "support.hh"

using namespace lzg;
using lzg::testing::random_grid_point;
using lzg::testing::random_zone;

namespace {

Network load(std::string const & name)
{
  return parse_network(read_text_file(std::string(LZG_MODELS_DIR) + "/" + name));
}

bool is_eq(Dbm const & z, VarIndex a, VarIndex b, std::int64_t c)
{
  return z.at(a, b) == Bound::le(c) && z.at(b, a) == Bound::le(-c);
}

/// Clock valuation of a global point: x = t - ~x.
Point clock_point(ZoneSpaces const & s, Point const & g)
{
  Point c{Rational(0)};
  for (ClockId x = 0; x < s.clock_count(); ++x)
    c.push_back(g[ZoneSpaces::global_ref().value] - g[s.global_offset(x).value]);
  return c;
}

/// Whether shifting every non-zero variable of `p` by a common amount can
/// bring it into `z`. Relative constraints are unaffected by the shift and
/// absolute ones bound it from both sides.
bool some_shift_inside(Dbm const & z, Point const & p)
{
  Interval shift;
  for (std::size_t i = 1; i < z.dim(); ++i) {
    for (std::size_t j = 1; j < z.dim(); ++j)
      if (i != j && !satisfies(p[i] - p[j], z.at(VarIndex{i}, VarIndex{j})))
        return false;
    Bound up = z.at(VarIndex{i}, zero_var); // p_i + s <| c
    if (!up.is_infinity())
      shift.cap_above(Rational(up.value()) - p[i], up.is_strict());
    Bound down = z.at(zero_var, VarIndex{i}); // -p_i - s <| c
    if (!down.is_infinity())
      shift.cap_below(-Rational(down.value()) - p[i], down.is_strict());
  }
  return !shift.is_empty();
}

Dbm walk(ZoneSpaces const & s, std::vector<std::string> const & actions)
{
  auto const & net = s.network();
  Dbm z = initial_local_zone(s);
  StateVector q = net.initial_state();
  for (auto const & a : actions) {
    auto moves = enabled_sync_sets(net, q, *net.find_action(a));
    EXPECT_EQ(moves.size(), 1u) << a;
    auto next = local_step(s, z, moves.at(0));
    EXPECT_TRUE(next) << a;
    z = *next;
    q = apply_move(net, q, moves[0]);
  }
  return z;
}

void expect_elapsed_shape(ZoneSpaces const & s, Dbm const & z)
{
  for (ProcessId p = 0; p < s.process_count(); ++p)
    for (std::size_t y = 0; y < z.dim(); ++y)
      if (y != s.local_ref(p).value) {
        EXPECT_TRUE(z.at(s.local_ref(p), VarIndex{y}).is_infinity());
      }
}

void expect_offsets_below_refs(ZoneSpaces const & s, Dbm const & z)
{
  for (ClockId x = 0; x < s.clock_count(); ++x)
    EXPECT_LE(z.at(s.local_offset(x), s.local_owner_ref(x)), Bound::le_zero());
}

} // namespace

TEST(InitialZone, OffsetsZeroReferencesFree)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  Dbm z = initial_local_zone(s);
  for (ClockId x = 0; x < 2; ++x) {
    EXPECT_TRUE(is_eq(z, s.local_offset(x), zero_var, 0));
    EXPECT_EQ(z.at(s.local_offset(x), s.local_owner_ref(x)), Bound::le_zero());
  }
  for (ProcessId p = 0; p < 2; ++p) {
    EXPECT_EQ(z.at(zero_var, s.local_ref(p)), Bound::le_zero());
    expect_elapsed_shape(s, z);
  }
  EXPECT_EQ(z.at(s.local_ref(1), s.local_ref(0)), Bound::infinity());
  EXPECT_EQ(local_elapse(s, z), z);
}

TEST(InitialZone, ProcessWithoutClocksOnlyHasItsReference)
{
  Network net = parse_network("process A\nprocess B\nclock A x\nstate A a initial\nstate B b initial\n");
  ZoneSpaces s(net);
  Dbm z = initial_local_zone(s);
  ASSERT_EQ(z.dim(), 4u);
  EXPECT_EQ(z.at(zero_var, s.local_ref(1)), Bound::le_zero());
  EXPECT_TRUE(z.at(s.local_ref(1), zero_var).is_infinity());
  EXPECT_EQ(z.at(s.local_ref(1), s.local_offset(0)), Bound::infinity());
}

TEST(InitialZone, GlobalHasSingleReference)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  Dbm g = initial_global_zone(s);
  EXPECT_TRUE(is_eq(g, s.global_offset(0), zero_var, 0));
  EXPECT_TRUE(is_eq(g, s.global_offset(1), zero_var, 0));
  EXPECT_TRUE(g.at(ZoneSpaces::global_ref(), zero_var).is_infinity());
  EXPECT_EQ(global_of_sync(s, initial_local_zone(s)), g);
}

TEST(GuardLocal, EqualityAtomGivesTwoConstraints)
{
  Network net = load("fig2.ta");
  ZoneSpaces s(net);
  auto cs = guard_local(s, net.process(0).transitions[0].guard);
  ASSERT_EQ(cs.size(), 2u);
  VarIndex t1 = s.local_ref(0), xo = s.local_offset(*net.find_clock("x"));
  EXPECT_EQ(cs[0].i, t1);
  EXPECT_EQ(cs[0].j, xo);
  EXPECT_EQ(cs[0].bound, Bound::le(2));
  EXPECT_EQ(cs[1].i, xo);
  EXPECT_EQ(cs[1].j, t1);
  EXPECT_EQ(cs[1].bound, Bound::le(-2));
  EXPECT_TRUE(guard_local(s, Guard{}).empty());
}

TEST(GuardLocal, AtomsUseTheirOwnersReference)
{
  Network net = load("ab_guards.ta");
  ZoneSpaces s(net);
  Guard g{{net.process(0).transitions[0].guard.atoms[0], net.process(1).transitions[0].guard.atoms[0]}};
  auto cs = guard_local(s, g);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].i, s.local_ref(0));
  EXPECT_EQ(cs[0].bound, Bound::le(1));
  EXPECT_EQ(cs[1].i, s.local_offset(1));
  EXPECT_EQ(cs[1].j, s.local_ref(1));
  EXPECT_EQ(cs[1].bound, Bound::le(-2));
}

TEST(LocalElapse, ContainsIndependentDelays)
{
  Network net = load("fig2.ta");
  ZoneSpaces s(net);
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> delay(0, 12);
  Dbm z = walk(s, {"b1", "a1"});
  // before elapsing: pin references, then elapse
  Dbm pinned = *constrain(z, s.local_ref(0), zero_var, Bound::le(4));
  pinned = *constrain(pinned, s.local_ref(1), zero_var, Bound::le(3));
  Dbm elapsed = local_elapse(s, pinned);
  for (int k = 0; k < 300; ++k) {
    Point p = sample_point(pinned, rng);
    for (ProcessId q = 0; q < 2; ++q)
      p[s.local_ref(q).value] += Rational(delay(rng), 2);
    EXPECT_TRUE(contains(elapsed, p));
  }
  EXPECT_EQ(local_elapse(s, elapsed), elapsed);
}

TEST(Reset, ResetClockFollowsItsReference)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  Dbm z = apply_reset_local(s, initial_local_zone(s), {*net.find_clock("x")});
  EXPECT_TRUE(is_eq(z, s.local_offset(0), s.local_ref(0), 0));
  EXPECT_TRUE(is_eq(z, s.local_offset(1), zero_var, 0));
  EXPECT_EQ(apply_reset_local(s, z, {}), z);
}

TEST(Reset, ImageOfSampledPoints)
{
  Network net = load("fig2.ta");
  ZoneSpaces s(net);
  std::mt19937_64 rng(4);
  Dbm z = walk(s, {"b1", "b2"});
  ClockId zc = *net.find_clock("z");
  Dbm r = apply_reset_local(s, z, {zc});
  for (int k = 0; k < 200; ++k) {
    Point p = sample_point(z, rng);
    p[s.local_offset(zc).value] = p[s.local_ref(1).value];
    EXPECT_TRUE(contains(r, p));
  }
}

TEST(Sync, EqualizesReferences)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  Dbm z = walk(s, {"a", "b"});
  auto synced = sync(s, z);
  ASSERT_TRUE(synced);
  EXPECT_TRUE(is_eq(*synced, s.local_ref(0), s.local_ref(1), 0));
  EXPECT_EQ(sync(s, *synced), synced);
  Dbm apart = *constrain(Dbm::universal(s.local_layout()), zero_var, s.local_ref(0), Bound::le(-5));
  apart = *constrain(apart, s.local_ref(1), zero_var, Bound::le(3));
  EXPECT_FALSE(sync(s, apart));
}

TEST(GlobalOfSync, BothOrdersAggregateToOneZone)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  auto g = global_of_sync(s, walk(s, {"a", "b"}));
  ASSERT_TRUE(g);
  // t >= ~x >= 0 and t >= ~y >= 0, nothing between the offsets
  Dbm expected = initial_global_zone(s);
  expected.set(s.global_offset(0), zero_var, Bound::infinity());
  expected.set(s.global_offset(1), zero_var, Bound::infinity());
  expected.set(s.global_offset(0), s.global_offset(1), Bound::infinity());
  expected.set(s.global_offset(1), s.global_offset(0), Bound::infinity());
  expected.set(s.global_offset(0), ZoneSpaces::global_ref(), Bound::le_zero());
  expected.set(s.global_offset(1), ZoneSpaces::global_ref(), Bound::le_zero());
  EXPECT_EQ(*g, *canonicalize(expected));
  EXPECT_EQ(global_of_sync(s, walk(s, {"b", "a"})), g);
}

TEST(LocalOfGlobal, RoundTripIsIdentity)
{
  Network net = load("fig2.ta");
  ZoneSpaces s(net);
  std::mt19937_64 rng(17);
  for (int k = 0; k < 100; ++k) {
    Dbm g = random_zone(s.global_layout(), rng, 5);
    Dbm l = local_of_global(s, g);
    EXPECT_EQ(canonicalize(l), l);
    EXPECT_EQ(global_of_sync(s, l), g);
  }
}

TEST(LocalOfGlobal, ReferencesBecomeEqual)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  // t >= ~x >= ~y = 0
  Dbm g = initial_global_zone(s);
  g.set(s.global_offset(0), zero_var, Bound::infinity());
  g.set(s.global_offset(0), ZoneSpaces::global_ref(), Bound::le_zero());
  g = *canonicalize(g);
  Dbm l = local_of_global(s, g);
  EXPECT_TRUE(is_eq(l, s.local_ref(0), s.local_ref(1), 0));
  EXPECT_EQ(l.at(s.local_offset(0), s.local_ref(1)), Bound::le_zero());
  EXPECT_EQ(l.at(s.local_offset(1), s.local_offset(0)), Bound::le_zero());
  EXPECT_TRUE(is_eq(l, s.local_offset(1), zero_var, 0));
}

TEST(ClockZone, Examples)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  Dbm c = to_clock_zone(s, initial_global_zone(s));
  EXPECT_TRUE(is_eq(c, s.clock_var(0), s.clock_var(1), 0));
  EXPECT_EQ(c.at(zero_var, s.clock_var(0)), Bound::le_zero());
  EXPECT_TRUE(c.at(s.clock_var(0), zero_var).is_infinity());

  Dbm g = *constrain(initial_global_zone(s), ZoneSpaces::global_ref(), s.global_offset(0), Bound::le(2));
  g = *constrain(g, s.global_offset(0), ZoneSpaces::global_ref(), Bound::le(-2));
  EXPECT_TRUE(is_eq(to_clock_zone(s, g), s.clock_var(0), zero_var, 2));
}

TEST(ClockZone, MembershipMatchesUpToTimeShift)
{
  Network net = load("fig2.ta");
  ZoneSpaces s(net);
  std::mt19937_64 rng(23);
  int inside = 0;
  for (int round = 0; round < 50; ++round) {
    Dbm g = random_zone(s.global_layout(), rng, 5);
    Dbm c = to_clock_zone(s, g);
    for (int k = 0; k < 20; ++k) {
      Point p = random_grid_point(g.dim(), rng, -3, 6);
      bool const expected = some_shift_inside(g, p);
      EXPECT_EQ(contains(c, clock_point(s, p)), expected);
      inside += expected ? 1 : 0;
      Point q = sample_point(g, rng);
      EXPECT_TRUE(contains(c, clock_point(s, q)));
    }
  }
  EXPECT_GT(inside, 50);
}

TEST(ExtraM, DropsBoundsAboveTheConstant)
{
  auto layout = make_layout({"x"});
  MaxConstants m{{3}, 3};
  Dbm z = *constrain(*constrain(Dbm::universal(layout), zero_var, VarIndex{1}, Bound::le(0)), VarIndex{1}, zero_var,
                     Bound::le(5));
  Dbm e = extra_m(z, m);
  EXPECT_TRUE(e.at(VarIndex{1}, zero_var).is_infinity());
  EXPECT_EQ(extra_m(e, m), e);
}

TEST(ExtraM, LowerBoundsAboveTheConstantBecomeStrict)
{
  auto layout = make_layout({"x"});
  MaxConstants m{{3}, 3};
  Dbm z = *constrain(Dbm::universal(layout), zero_var, VarIndex{1}, Bound::le(-4));
  Dbm e = extra_m(z, m);
  EXPECT_EQ(e.at(zero_var, VarIndex{1}), Bound::lt(-3));
  EXPECT_TRUE(e.at(VarIndex{1}, zero_var).is_infinity());
}

TEST(ExtraM, SmallConstantsAreKept)
{
  auto layout = make_layout({"x", "y"});
  MaxConstants m{{3, 4}, 4};
  Dbm z = *constrain(Dbm::universal(layout), VarIndex{1}, zero_var, Bound::le(3));
  z = *constrain(z, zero_var, VarIndex{2}, Bound::lt(-1));
  z = *constrain(z, VarIndex{2}, VarIndex{1}, Bound::le(1));
  EXPECT_EQ(extra_m(z, m), z);
}

TEST(ExtraM, GrowsAndIsIdempotent)
{
  auto layout = make_layout({"x", "y", "z"});
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> bound(-1, 4);
  for (int k = 0; k < 1000; ++k) {
    MaxConstants m;
    for (int c = 0; c < 3; ++c) {
      int b = bound(rng);
      m.per_clock.push_back(b < 0 ? std::nullopt : std::optional<std::int64_t>(b));
    }
    Dbm z = random_zone(layout, rng, 5, 6);
    for (std::size_t x = 1; x < 4; ++x) {
      auto nonneg = constrain(z, zero_var, VarIndex{x}, Bound::le_zero());
      if (nonneg)
        z = *nonneg;
    }
    Dbm e = extra_m(z, m);
    EXPECT_TRUE(includes(e, z));
    EXPECT_EQ(extra_m(e, m), e);
    EXPECT_EQ(canonicalize(e), e);
  }
}

TEST(SyncSubsume, ReflexiveAndSymmetricOnEqualZones)
{
  Network net = load("fig1.ta");
  ZoneSpaces s(net);
  MaxConstants m = max_constants(net);
  Dbm ab = walk(s, {"a", "b"});
  Dbm ba = walk(s, {"b", "a"});
  EXPECT_TRUE(sync_subsume(s, ab, ab, m));
  EXPECT_TRUE(sync_subsume(s, ab, ba, m));
  EXPECT_TRUE(sync_subsume(s, ba, ab, m));
}

TEST(SyncSubsume, LargerCandidateIsNotCovered)
{
  Network net = load("fig2.ta");
  ZoneSpaces s(net);
  MaxConstants m = max_constants(net);
  std::mt19937_64 rng(8);
  Dbm small = walk(s, {"b1"});
  Dbm large = initial_local_zone(s);
  EXPECT_FALSE(sync_subsume(s, large, small, m));
  auto large_c = *sync_clock_zone(s, large);
  auto small_a = extra_m(*sync_clock_zone(s, small), m);
  auto pieces = subtract(large_c, small_a);
  ASSERT_FALSE(pieces.empty());
  Point w = sample_point(pieces.front(), rng);
  EXPECT_TRUE(contains(large_c, w));
  EXPECT_FALSE(contains(small_a, w));
}

TEST(Pipelines, ShapeAndOrderInvariantsHold)
{
  std::mt19937_64 rng(99);
  for (auto const & entry : std::filesystem::directory_iterator(LZG_MODELS_DIR)) {
    Network net = parse_network(read_text_file(entry.path().string()));
    ZoneSpaces s(net);
    MaxConstants m = max_constants(net);
    for (int walkno = 0; walkno < 30; ++walkno) {
      Dbm z = initial_local_zone(s);
      StateVector q = net.initial_state();
      for (int step = 0; step < 8; ++step) {
        expect_elapsed_shape(s, z);
        expect_offsets_below_refs(s, z);
        EXPECT_EQ(local_elapse(s, z), z);
        auto synced = sync(s, z);
        ASSERT_TRUE(synced);
        expect_offsets_below_refs(s, *synced);
        EXPECT_EQ(sync(s, *synced), synced);
        auto c = *sync_clock_zone(s, z);
        EXPECT_EQ(extra_m(extra_m(c, m), m), extra_m(c, m));
        std::vector<std::pair<Move, Dbm>> options;
        for (Move const & mv : enabled_moves(net, q))
          if (auto next = local_step(s, z, mv))
            options.emplace_back(mv, *next);
        if (options.empty())
          break;
        auto const & pick = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        q = apply_move(net, q, pick.first);
        z = pick.second;
      }
    }
  }
}
