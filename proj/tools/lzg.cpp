// Command-line front end: reachability checks, graph export, oracle suites
// and benchmark generation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

#include "CLI11.hpp"
#include "json.hpp"
#include "lzg/bench.hh"
#include "lzg/explore.hh"
#include "lzg/oracle.hh"

using namespace lzg;
using nlohmann::ordered_json;

namespace {

enum Exit : int {
  exit_unreachable = 0,
  exit_failure = 1,
  exit_usage = 2,
  exit_internal = 3,
  exit_timeout = 4,
  exit_reachable = 10,
};

/// Raised for bad arguments discovered after CLI parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Level { error, info, debug };

Level log_level()
{
  char const * env = std::getenv("LZG_LOG");
  std::string const v = env ? env : "";
  if (v == "debug")
    return Level::debug;
  if (v == "info")
    return Level::info;
  return Level::error;
}

void log(Level at, std::string const & msg)
{
  static Level const level = log_level();
  if (at <= level)
    std::cerr << "lzg: " << msg << "\n";
}

Network load_model(std::string const & path)
{
  std::string text;
  try {
    text = read_text_file(path);
  } catch (std::runtime_error const & e) {
    throw UsageError(e.what());
  }
  try {
    Network net = parse_network(text);
    log(Level::info, "loaded " + path + ": " + std::to_string(net.process_count()) + " processes, " +
                         std::to_string(net.clock_count()) + " clocks");
    return net;
  } catch (ParseError const & e) {
    throw UsageError(path + ":" + e.what());
  }
}

TargetSpec load_target(Network const & net, std::string const & text)
{
  try {
    return parse_target(net, text);
  } catch (ParseError const & e) {
    throw UsageError("target: " + e.message() + " (column " + std::to_string(e.column()) + ")");
  }
}

SearchResult run_engine(Network const & net, std::string const & algorithm, TargetSpec const * target,
                        SearchOptions const & opt)
{
  log(Level::info, "exploring with the " + algorithm + " engine");
  return algorithm == "global" ? explore_global(net, target, opt) : explore_local_sync(net, target, opt);
}

ordered_json stats_json(Network const & net, SearchResult const & r)
{
  ordered_json j;
  j["engine"] = r.engine;
  j["verdict"] = std::string(to_string(r.verdict));
  j["visited"] = r.stats.visited;
  j["stored"] = r.stats.stored;
  j["frontier_max"] = r.stats.frontier_max;
  if (r.verdict == Verdict::reachable)
    j["witness"] = witness_string(net, r.witness);
  return j;
}

void write_file(std::string const & path, std::string const & content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content) || !out.flush())
    throw UsageError("cannot write " + path);
}

int verdict_exit(Verdict v)
{
  switch (v) {
  case Verdict::reachable:
    return exit_reachable;
  case Verdict::unreachable:
    return exit_unreachable;
  case Verdict::timeout:
    return exit_timeout;
  }
  return exit_internal;
}

void print_summary(Network const & net, SearchResult const & r)
{
  std::cout << to_string(r.verdict) << "\n";
  if (r.verdict == Verdict::reachable)
    std::cout << "witness: " << witness_string(net, r.witness) << "\n";
  std::cout << "engine: " << r.engine << "\nvisited: " << r.stats.visited << "\nstored: " << r.stats.stored
            << "\nfrontier max: " << r.stats.frontier_max << "\nseconds: " << r.stats.seconds << "\n";
}

std::pair<std::size_t, std::size_t> parse_sizes(std::string const & text)
{
  static std::regex const re(R"((\d+)\.\.(\d+))");
  std::smatch m;
  if (!std::regex_match(text, m, re))
    throw UsageError("sizes must look like a..b");
  std::size_t const a = std::stoul(m[1]), b = std::stoul(m[2]);
  if (a < 2 || a > b || b > 64)
    throw UsageError("invalid size range " + text + " (need 2 <= a <= b <= 64)");
  return {a, b};
}

std::vector<BenchSpec> bench_specs(std::vector<std::string> const & families, std::string const & sizes)
{
  auto [a, b] = parse_sizes(sizes);
  std::vector<BenchSpec> specs;
  for (auto const & name : families) {
    auto f = family_from_string(name);
    if (!f)
      throw UsageError("unknown family " + name);
    for (std::size_t n = a; n <= b; ++n)
      specs.push_back({*f, n});
  }
  return specs;
}

ordered_json check_json(CheckResult const & c)
{
  ordered_json j;
  j["name"] = c.name;
  j["checked"] = c.checked;
  j["pass"] = c.pass();
  j["failures"] = c.failures;
  return j;
}

} // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Reachability for networks of timed automata with local-time zones"};
  app.require_subcommand(1);

  std::string model, target, algorithm = "local", stats_path, dot_path, suite, sizes, out_dir, json_path;
  bool no_retro = false, exhaustive = false;
  std::optional<double> timeout;
  double bench_timeout = 90;
  std::uint64_t seed = 42;
  std::size_t count = 100;
  std::vector<std::string> families;
  auto algorithms = CLI::IsMember({"global", "local"});

  auto * check = app.add_subcommand("check", "decide whether a target state is reachable");
  check->add_option("model", model, "model file")->required();
  check->add_option("--target", target, "comma-separated proc=state pairs")->required();
  check->add_option("--algorithm", algorithm, "global or local (default)")->check(algorithms);
  check->add_option("--stats-json", stats_path, "write search statistics as JSON");
  check->add_option("--timeout", timeout, "seconds before giving up");
  check->add_flag("--no-retro-cover", no_retro, "keep stored nodes that a newcomer covers");

  auto * explore_cmd = app.add_subcommand("explore", "build the zone graph and export it");
  explore_cmd->add_option("model", model, "model file")->required();
  explore_cmd->add_option("--algorithm", algorithm, "global or local (default)")->check(algorithms);
  explore_cmd->add_option("--dot", dot_path, "write the graph in DOT format");
  explore_cmd->add_option("--target", target, "stop at this state unless --exhaustive");
  explore_cmd->add_option("--stats-json", stats_path, "write search statistics as JSON");
  explore_cmd->add_option("--timeout", timeout, "seconds before giving up");
  explore_cmd->add_flag("--exhaustive", exhaustive, "keep exploring after the target is found");
  explore_cmd->add_flag("--no-retro-cover", no_retro, "keep stored nodes that a newcomer covers");

  auto * oracle = app.add_subcommand("oracle", "run ground-truth checks; JSON report on stdout");
  oracle->add_option("--suite", suite, "aggregation, runs or flaws")
      ->required()
      ->check(CLI::IsMember({"aggregation", "runs", "flaws"}));
  oracle->add_option("--seed", seed, "random seed");
  oracle->add_option("--count", count, "random networks (aggregation) or words per network (runs)");

  auto * gen = app.add_subcommand("gen", "write benchmark models");
  gen->add_option("--family", families, "parallel, fischer, dining, corsso, critical")->required();
  gen->add_option("--sizes", sizes, "size range a..b")->required();
  gen->add_option("--out", out_dir, "output directory")->required();

  auto * bench = app.add_subcommand("bench", "compare both engines on benchmark models");
  bench->add_option("--family", families, "families (default: all)");
  bench->add_option("--sizes", sizes, "size range a..b")->required();
  bench->add_option("--timeout", bench_timeout, "seconds per engine and instance (default 90)");
  bench->add_option("--json", json_path, "write the report as JSON");
  bench->add_option("--out", out_dir, "also write the generated models here");

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const & e) {
    return app.exit(e);
  } catch (CLI::ParseError const & e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    SearchOptions opt;
    opt.retro_cover = !no_retro;
    opt.timeout_seconds = timeout;

    if (check->parsed() || explore_cmd->parsed()) {
      Network const net = load_model(model);
      std::optional<TargetSpec> spec;
      if (!target.empty())
        spec = load_target(net, target);
      opt.exhaustive = exhaustive;
      SearchResult const r = run_engine(net, algorithm, spec ? &*spec : nullptr, opt);
      print_summary(net, r);
      if (!stats_path.empty())
        write_file(stats_path, stats_json(net, r).dump(2) + "\n");
      if (!dot_path.empty())
        write_file(dot_path, export_dot(net, r));
      if (check->parsed() || spec)
        return verdict_exit(r.verdict);
      return r.verdict == Verdict::timeout ? exit_timeout : 0;
    }

    if (oracle->parsed()) {
      std::vector<CheckResult> checks;
      if (suite == "aggregation")
        checks = aggregation_suite(count, seed);
      else if (suite == "runs")
        checks = runs_suite(count, seed);
      else
        checks = flaws_suite();
      ordered_json rep;
      rep["suite"] = suite;
      rep["seed"] = seed;
      rep["count"] = count;
      bool pass = true;
      rep["checks"] = ordered_json::array();
      for (auto const & c : checks) {
        pass = pass && c.pass();
        rep["checks"].push_back(check_json(c));
        log(Level::info, c.name + ": " + std::to_string(c.checked) + " checked, " +
                             std::to_string(c.failures.size()) + " failed");
      }
      rep["pass"] = pass;
      std::cout << rep.dump(2) << "\n";
      return pass ? 0 : exit_failure;
    }

    if (gen->parsed() || bench->parsed()) {
      if (families.empty())
        for (Family f : all_families())
          families.emplace_back(to_string(f));
      auto const specs = bench_specs(families, sizes);
      if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec)
          throw UsageError("cannot create " + out_dir);
        for (auto const & s : specs) {
          BenchModel const m = generate(s);
          write_file((std::filesystem::path(out_dir) / (m.name + ".ta")).string(), m.text);
          if (gen->parsed())
            std::cout << m.name << ".ta target " << m.target << "\n";
        }
      }
      if (gen->parsed())
        return 0;
      BenchReport const rep = run_suite(specs, bench_timeout, [](BenchRow const & r) {
        log(Level::info, r.model + " " + r.engine + ": " + std::string(to_string(r.verdict)) + ", " +
                             std::to_string(r.stats.stored) + " stored");
      });
      std::cout << render_table(rep);
      if (!json_path.empty()) {
        ordered_json arr = ordered_json::array();
        for (auto const & r : rep) {
          ordered_json j;
          j["model"] = r.model;
          j["family"] = std::string(to_string(r.family));
          j["size"] = r.size;
          j["engine"] = r.engine;
          j["verdict"] = std::string(to_string(r.verdict));
          j["visited"] = r.stats.visited;
          j["stored"] = r.stats.stored;
          j["frontier_max"] = r.stats.frontier_max;
          j["seconds"] = r.stats.seconds;
          arr.push_back(std::move(j));
        }
        write_file(json_path, arr.dump(2) + "\n");
      }
      return 0;
    }
  } catch (UsageError const & e) {
    std::cerr << "lzg: " << e.what() << "\n";
    return exit_usage;
  } catch (std::exception const & e) {
    std::cerr << "lzg: internal error: " << e.what() << "\n";
    return exit_internal;
  }
  return exit_usage;
}
