#include "nnequiv/refinement.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "nnequiv/network.hpp"

namespace nnequiv {

StrategyKind parse_strategy(const std::string& s) {
  if (s == "E") return StrategyKind::Exact;
  if (s == "F") return StrategyKind::FirstRefine;
  if (s == "A") return StrategyKind::FirstRefineApproxLP;
  if (s == "M") return StrategyKind::RunningMax;
  if (s == "L") return StrategyKind::LastMinusOne;
  if (s == "O") return StrategyKind::OracleReplay;
  throw ParseError("unknown strategy \"" + s + "\" (expected one of E,F,A,M,L,O)");
}

char strategy_letter(StrategyKind k) {
  switch (k) {
    case StrategyKind::Exact: return 'E';
    case StrategyKind::FirstRefine: return 'F';
    case StrategyKind::FirstRefineApproxLP: return 'A';
    case StrategyKind::RunningMax: return 'M';
    case StrategyKind::LastMinusOne: return 'L';
    case StrategyKind::OracleReplay: return 'O';
  }
  return '?';
}

DepthTable::Advice DepthTable::advice(const std::string& path_id, int split_depth) const {
  bool any_prefix = false;
  for (const auto& [branch, depth] : entries_) {
    if (branch.size() < path_id.size() || branch.compare(0, path_id.size(), path_id) != 0)
      continue;
    any_prefix = true;
    if (depth > split_depth) return Advice::Split;
  }
  return any_prefix ? Advice::Overapprox : Advice::Missing;
}

DepthTable DepthTable::from_depth_log(const std::vector<DepthRecord>& log) {
  DepthTable t;
  for (const auto& rec : log) t.add(rec.path_id, rec.success_depth);
  return t;
}

DepthTable DepthTable::from_run(const RunStats& stats) {
  DepthTable t = from_depth_log(stats.depth_log);
  if (stats.cex_record) t.add(stats.cex_record->path_id, stats.cex_record->success_depth);
  return t;
}

DepthTable DepthTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open depth table: " + path);
  DepthTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "path_id,success_depth") continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError("malformed depth table row: \"" + line + "\"");
    std::string branch = line.substr(0, comma);
    for (char c : branch)
      if (c != 'L' && c != 'R')
        throw ParseError("malformed branch string: \"" + branch + "\"");
    t.add(branch, std::stoi(line.substr(comma + 1)));
  }
  return t;
}

void DepthTable::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write depth table: " + path);
  out << "path_id,success_depth\n";
  for (const auto& [branch, depth] : entries_) out << branch << "," << depth << "\n";
}

Strategy::Strategy(StrategyKind kind, DepthTable table) : kind_(kind), table_(std::move(table)) {
  if (kind_ == StrategyKind::OracleReplay && table_.empty())
    throw std::invalid_argument("OracleReplay requires a recorded depth table");
}

bool Strategy::should_split(const std::string& path_id, int split_depth, int forced_depth) {
  if (split_depth < forced_depth) return true;
  switch (kind_) {
    case StrategyKind::Exact:
      return true;
    case StrategyKind::FirstRefine:
    case StrategyKind::FirstRefineApproxLP:
      return false;  // forced_depth alone drives refinement splits
    case StrategyKind::RunningMax: {
      std::lock_guard<std::mutex> lock(mu_);
      return split_depth < running_max_;
    }
    case StrategyKind::LastMinusOne: {
      std::lock_guard<std::mutex> lock(mu_);
      return split_depth < std::max(last_depth_ - 1, 0);
    }
    case StrategyKind::OracleReplay: {
      DepthTable::Advice a = table_.advice(path_id, split_depth);
      if (a == DepthTable::Advice::Missing)
        throw std::runtime_error("depth table has no entry extending path \"" + path_id +
                                 "\": table and run do not match");
      return a == DepthTable::Advice::Split;
    }
  }
  return true;
}

void Strategy::on_success(int depth) {
  std::lock_guard<std::mutex> lock(mu_);
  running_max_ = std::max(running_max_, depth);
  last_depth_ = depth;
}

int Strategy::running_max() const {
  std::lock_guard<std::mutex> lock(mu_);
  return running_max_;
}

int Strategy::last_depth() const {
  std::lock_guard<std::mutex> lock(mu_);
  return last_depth_;
}

}  // namespace nnequiv
