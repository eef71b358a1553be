// Command-line front end: equivalence verification runs, counterexample
// search, the constraint-to-equivalence reduction compiler, and depth-log
// statistics.
//
// Exit codes for verify: 0 equivalent, 1 not equivalent, 2 timeout or
// inconclusive, >2 error. find-cex: 0 counterexample found, 2 none.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nnequiv/gpe.hpp"
#include "nnequiv/network.hpp"
#include "nnequiv/oracle.hpp"
#include "nnequiv/reduction.hpp"
#include "nnequiv/refinement.hpp"

namespace {

using namespace nnequiv;

struct CommonArgs {
  std::string net_r_path;
  std::string net_t_path;
  std::string box_path;
  std::string property_text = "epsilon:0.05";
  std::string strategy_text = "L";  // best practical heuristic; see README
  double timeout = 3600.0;
  int workers = 1;
  int feasibility_cadence = 1;
  std::string depth_log_path;
  std::string depth_table_out_path;
  std::string depth_table_path;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--net-r", a.net_r_path, "reference network JSON")->required();
  cmd->add_option("--net-t", a.net_t_path, "test network JSON")->required();
  cmd->add_option("--box", a.box_path, "input box JSON")->required();
  cmd->add_option("--property", a.property_text, "epsilon:<float> or top1")->required();
  cmd->add_option("--strategy", a.strategy_text, "one of E,F,A,M,L,O (default L)");
  cmd->add_option("--timeout", a.timeout, "seconds (default 3600)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", a.workers, "worklist workers (default 1; >1 is nondeterministic)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--feasibility-cadence", a.feasibility_cadence,
                  "LP feasibility check every Nth split; 0 disables (default 1)");
  cmd->add_option("--depth-log", a.depth_log_path, "write proven-leaf depth CSV here");
  cmd->add_option("--depth-table-out", a.depth_table_out_path, "write a replay depth table here");
  cmd->add_option("--depth-table", a.depth_table_path, "depth table to replay (strategy O)");
  cmd->add_option("--seed", a.seed, "RNG seed for auxiliary sampling (default 0)");
}

EngineConfig build_config(const CommonArgs& a, bool find_cex) {
  EngineConfig cfg;
  cfg.property = EquivProperty::parse(a.property_text);
  cfg.strategy = parse_strategy(a.strategy_text);
  cfg.timeout_seconds = a.timeout;
  cfg.workers = a.workers;
  cfg.feasibility_cadence = a.feasibility_cadence;
  cfg.find_cex_mode = find_cex;
  cfg.seed = a.seed;
  if (cfg.strategy == StrategyKind::OracleReplay) {
    if (a.depth_table_path.empty())
      throw ParseError("strategy O requires --depth-table");
    cfg.depth_table = DepthTable::load_csv(a.depth_table_path);
  }
  return cfg;
}

void write_logs(const CommonArgs& a, const RunStats& stats) {
  if (!a.depth_log_path.empty())
    DepthTable::from_depth_log(stats.depth_log).save_csv(a.depth_log_path);
  if (!a.depth_table_out_path.empty())
    DepthTable::from_run(stats).save_csv(a.depth_table_out_path);
}

void print_stats(const RunStats& s) {
  std::printf("paths_total=%ld checks_run=%ld descend_ops=%ld refinements=%ld\n", s.paths_total,
              s.checks_run, s.descend_ops, s.refinements);
  std::printf("infeasible_dropped=%ld overapprox_total=%ld wall_seconds=%.3f\n",
              s.infeasible_dropped, s.overapprox_total, s.wall_seconds);
}

int run_verify(const CommonArgs& a, bool find_cex) {
  Network net_r = load_network(a.net_r_path);
  Network net_t = load_network(a.net_t_path);
  InputBox box = load_box(a.box_path);
  EngineConfig cfg = build_config(a, find_cex);

  EnumerationResult res = enumerate_equivalence(net_r, net_t, box, cfg);
  write_logs(a, res.stats);

  std::printf("verdict: %s\n", res.verdict.kind_string().c_str());
  print_stats(res.stats);
  if (res.verdict.cex) std::printf("counterexample: %s\n", res.verdict.cex->to_json().c_str());

  if (find_cex)
    return res.verdict.kind == Verdict::Kind::NotEquivalent ? 0 : 2;
  switch (res.verdict.kind) {
    case Verdict::Kind::Equivalent: return 0;
    case Verdict::Kind::NotEquivalent: return 1;
    case Verdict::Kind::Timeout: return 2;
  }
  return 3;
}

int run_reduce(const std::string& instance_path, const std::string& out_r,
               const std::string& out_t, const std::string& out_box) {
  NetVerifyInstance inst = NetVerifyInstance::load(instance_path);
  EquivPair pair = build_equiv_instance(inst);
  save_network(pair.r, out_r);
  save_network(pair.t, out_t);
  if (!out_box.empty()) {
    std::ofstream f(out_box);
    if (!f) throw ParseError("cannot write box file: " + out_box);
    f << serialize_box(inst.box) << "\n";
  }
  std::printf("wrote %s (%zu layers) and %s (%zu layers), epsilon=%g\n", out_r.c_str(),
              pair.r.layers.size(), out_t.c_str(), pair.t.layers.size(), inst.epsilon);
  return 0;
}

int run_stats(const std::string& depth_log_path, int window) {
  DepthTable table = DepthTable::load_csv(depth_log_path);
  const auto& entries = table.entries();
  if (entries.empty()) {
    std::printf("count=0\n");
    return 0;
  }
  long count = static_cast<long>(entries.size());
  int mn = entries[0].second, mx = entries[0].second;
  double mean = 0.0;
  for (const auto& [id, d] : entries) {
    mn = std::min(mn, d);
    mx = std::max(mx, d);
    mean += d;
  }
  mean /= static_cast<double>(count);
  std::printf("count=%ld min=%d max=%d mean=%.4f window=%d\n", count, mn, mx, mean, window);

  std::printf("index,depth,running_max,running_p95\n");
  int running_max = 0;
  std::vector<int> win;
  for (long i = 0; i < count; ++i) {
    int d = entries[i].second;
    running_max = i == 0 ? d : std::max(running_max, d);
    win.clear();
    long start = std::max<long>(0, i - window + 1);
    for (long k = start; k <= i; ++k) win.push_back(entries[k].second);
    std::sort(win.begin(), win.end());
    std::size_t rank = static_cast<std::size_t>(
        std::max<long>(0, static_cast<long>(std::ceil(0.95 * win.size())) - 1));
    std::printf("%ld,%d,%d,%d\n", i, d, running_max, win[rank]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geometric path enumeration equivalence verifier for ReLU networks"};
  app.require_subcommand(1);

  CommonArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "prove or refute equivalence of two networks");
  add_common(verify, verify_args);

  CommonArgs cex_args;
  CLI::App* find_cex =
      app.add_subcommand("find-cex", "search for a concrete non-equivalence witness");
  add_common(find_cex, cex_args);

  std::string instance_path, out_r, out_t, out_box;
  CLI::App* reduce =
      app.add_subcommand("reduce", "compile a constraint instance into an (R,T) network pair");
  reduce->add_option("--instance", instance_path, "instance JSON")->required();
  reduce->add_option("--out-r", out_r, "output path for network R")->required();
  reduce->add_option("--out-t", out_t, "output path for network T")->required();
  reduce->add_option("--out-box", out_box, "also write the instance's input box here");

  std::string depth_log_path;
  int window = 479;
  CLI::App* stats = app.add_subcommand("stats", "summarize a depth log CSV");
  stats->add_option("--depth-log", depth_log_path, "depth log CSV")->required();
  stats->add_option("--window", window, "running percentile window (default 479)")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return run_verify(verify_args, false);
    if (find_cex->parsed()) return run_verify(cex_args, true);
    if (reduce->parsed()) return run_reduce(instance_path, out_r, out_t, out_box);
    if (stats->parsed()) return run_stats(depth_log_path, window);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 3;
}
