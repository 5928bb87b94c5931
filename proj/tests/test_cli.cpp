#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

/// Runs the CLI with `args`, capturing stdout; stderr is discarded.
Result run(std::string const & args, std::string const & env = "")
{
  std::string const cmd = env + " " + std::string(LZG_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE * pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
    out.append(buf, n);
  int const status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string model(std::string const & name) { return std::string(LZG_MODELS_DIR) + "/" + name; }

std::string slurp(fs::path const & p)
{
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(std::string const & name)
{
  fs::path dir = fs::temp_directory_path() / ("lzg_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::size_t dot_nodes(std::string const & dot)
{
  std::istringstream in(dot);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);)
    if (line.rfind("  n", 0) == 0 && line.size() > 3 && std::isdigit(static_cast<unsigned char>(line[3])) &&
        line.find("->") == std::string::npos)
      ++n;
  return n;
}

} // namespace

TEST(Check, Fig2UnreachableLocal)
{
  auto r = run("check " + model("fig2.ta") + " --target P1=p2 --algorithm local");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("unreachable", 0), 0u);
}

TEST(Check, Fig2UnreachableGlobal)
{
  EXPECT_EQ(run("check " + model("fig2.ta") + " --target P1=p2,P2=q3 --algorithm global").code, 0);
}

TEST(Check, Fig1ReachableWithWitness)
{
  auto r = run("check " + model("fig1.ta") + " --target P1=p1,P2=q1");
  EXPECT_EQ(r.code, 10);
  EXPECT_EQ(r.out.rfind("reachable", 0), 0u);
  EXPECT_NE(r.out.find("witness: a b"), std::string::npos);
}

TEST(Check, MalformedTargetIsUsageError)
{
  EXPECT_EQ(run("check " + model("fig1.ta") + " --target P1").code, 2);
  EXPECT_EQ(run("check " + model("fig1.ta") + " --target P9=p1").code, 2);
  EXPECT_EQ(run("check " + model("fig1.ta")).code, 2);
}

TEST(Check, UnreadableOrInvalidModel)
{
  EXPECT_EQ(run("check /nonexistent.ta --target P1=p1").code, 2);
  auto bad = scratch("bad.ta");
  std::ofstream(bad) << "process P1\nclock P2 x\n";
  EXPECT_EQ(run("check " + bad.string() + " --target P1=p1").code, 2);
}

TEST(Check, UnknownFlagRejected)
{
  EXPECT_EQ(run("check " + model("fig1.ta") + " --target P1=p1 --frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("check " + model("fig1.ta") + " --target P1=p1 --algorithm zig").code, 2);
}

TEST(Check, StatsJsonIsDeterministic)
{
  auto a = scratch("a.json"), b = scratch("b.json");
  std::string const args = "check " + model("fig2.ta") + " --target P1=p2 --stats-json ";
  ASSERT_EQ(run(args + a.string()).code, 0);
  ASSERT_EQ(run(args + b.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  auto j = nlohmann::json::parse(slurp(a));
  EXPECT_EQ(j["verdict"], "unreachable");
  EXPECT_EQ(j["engine"], "local");
  EXPECT_GT(j["stored"].get<int>(), 0);
}

TEST(Explore, Fig1DotNodeCounts)
{
  auto local = scratch("local.dot"), global = scratch("global.dot");
  EXPECT_EQ(run("explore " + model("fig1.ta") + " --algorithm local --exhaustive --dot " + local.string()).code, 0);
  EXPECT_EQ(run("explore " + model("fig1.ta") + " --algorithm global --exhaustive --dot " + global.string()).code,
            0);
  EXPECT_EQ(dot_nodes(slurp(local)), 4u);
  EXPECT_EQ(dot_nodes(slurp(global)), 5u);
}

TEST(Explore, UnwritableDotPath)
{
  EXPECT_EQ(run("explore " + model("fig1.ta") + " --dot /nonexistent/dir/g.dot").code, 2);
}

TEST(Oracle, FlawsPass)
{
  auto r = run("oracle --suite flaws");
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["checks"].size(), 2u);
}

TEST(Oracle, AggregationSeeded)
{
  auto r = run("oracle --suite aggregation --count 200 --seed 42");
  EXPECT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(r.out, run("oracle --suite aggregation --count 200 --seed 42").out);
}

TEST(Oracle, RunsZeroCountTrivial)
{
  auto r = run("oracle --suite runs --count 0");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(r.out)["checks"].empty());
}

TEST(Oracle, UnknownSuite) { EXPECT_EQ(run("oracle --suite nope").code, 2); }

TEST(Gen, WritesOneModel)
{
  auto dir = scratch("gen");
  fs::remove_all(dir);
  EXPECT_EQ(run("gen --family fischer --sizes 3..3 --out " + dir.string()).code, 0);
  std::size_t files = 0;
  for (auto const & e : fs::directory_iterator(dir)) {
    ++files;
    EXPECT_EQ(e.path().filename(), "fischer3.ta");
  }
  EXPECT_EQ(files, 1u);
  EXPECT_EQ(run("check " + (dir / "fischer3.ta").string() + " --target P1=cs1,P2=cs2").code, 0);
}

TEST(Gen, InvalidRange)
{
  EXPECT_EQ(run("gen --family fischer --sizes 3..2 --out /tmp").code, 2);
  EXPECT_EQ(run("gen --family fischer --sizes 1..2 --out /tmp").code, 2);
  EXPECT_EQ(run("gen --family fischer --sizes three --out /tmp").code, 2);
  EXPECT_EQ(run("gen --family csma --sizes 2..2 --out /tmp").code, 2);
}

TEST(Bench, TableAndJson)
{
  auto json = scratch("bench.json");
  auto r = run("bench --family parallel --sizes 2..3 --json " + json.string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("parallel2"), std::string::npos);
  EXPECT_NE(r.out.find("parallel3"), std::string::npos);
  auto j = nlohmann::json::parse(slurp(json));
  ASSERT_EQ(j.size(), 4u);
  EXPECT_EQ(j[0]["engine"], "global");
  EXPECT_EQ(j[1]["engine"], "local");
  EXPECT_EQ(j[0]["verdict"], j[1]["verdict"]);
}

TEST(Logging, DebugGoesToStderrOnly)
{
  std::string const args = "check " + model("fig1.ta") + " --target P1=p1";
  auto quiet = run(args, "LZG_LOG=error");
  auto loud = run(args, "LZG_LOG=debug");
  EXPECT_EQ(quiet.code, loud.code);
  EXPECT_EQ(quiet.out.substr(0, quiet.out.find("seconds")), loud.out.substr(0, loud.out.find("seconds")));
}
