// Refinement strategy family: the split vs over-approximate decision at
// straddling neurons, plus the shared run aggregates behind the depth
// heuristics.
//
//   E  split every straddling neuron (exact)
//   F  over-approximate everything, refine the first logged node on failure
//   A  F with the dimensional LP approximation of split constraints
//   M  split while below the running maximum of recorded success depths
//   L  split while below the previous path's success depth minus one
//   O  replay success depths recorded by an earlier run on identical inputs

#pragma once

#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "nnequiv/property.hpp"

namespace nnequiv {

enum class StrategyKind {
  Exact,
  FirstRefine,
  FirstRefineApproxLP,
  RunningMax,
  LastMinusOne,
  OracleReplay,
};

// Single letters E/F/A/M/L/O.
StrategyKind parse_strategy(const std::string& s);
char strategy_letter(StrategyKind k);

// Recorded success depths keyed by branch string (one L/R per exact split).
// Prefix queries drive OracleReplay: a path splits while some recorded
// path extends its current branch string deeper than its split count.
class DepthTable {
 public:
  enum class Advice { Split, Overapprox, Missing };

  void add(const std::string& path_id, int depth) { entries_.emplace_back(path_id, depth); }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, int>>& entries() const { return entries_; }

  Advice advice(const std::string& path_id, int split_depth) const;

  static DepthTable from_depth_log(const std::vector<DepthRecord>& log);
  // Replay table for a whole run: proven-leaf depths plus, for runs that
  // ended in a counterexample, that path's partial depth (so a replay walks
  // back into the same region instead of erroring on the unexplored subtree).
  static DepthTable from_run(const RunStats& stats);
  static DepthTable load_csv(const std::string& path);
  void save_csv(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, int>> entries_;
};

class Strategy {
 public:
  explicit Strategy(StrategyKind kind, DepthTable table = {});

  StrategyKind kind() const { return kind_; }

  // Whether split constraints collapse error dimensions into the right-hand
  // side (keeping LP problems over the input variables). F keeps the full
  // dimensionality; everything else uses the reduction.
  bool lp_approx() const { return kind_ != StrategyKind::FirstRefine; }

  // Decision at a straddling neuron. `forced_depth` is the per-path floor
  // raised by refinement. Throws on an OracleReplay table miss.
  bool should_split(const std::string& path_id, int split_depth, int forced_depth);

  // Records a proven leaf's depth; updates the running aggregates.
  void on_success(int depth);

  int running_max() const;
  int last_depth() const;

 private:
  StrategyKind kind_;
  DepthTable table_;
  mutable std::mutex mu_;
  int running_max_ = 0;
  int last_depth_ = 0;
};

}  // namespace nnequiv
