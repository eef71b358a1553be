#include "nnequiv/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "nnequiv/gpe.hpp"

namespace nnequiv {

std::string OracleReport::to_json() const {
  nlohmann::json j;
  j["samples"] = samples;
  j["worst_deviation"] = worst_deviation;
  j["worst_x"] = worst_x;
  j["argmax_disagreements"] = argmax_disagreements;
  j["verdict_hint"] = violation_found ? "ViolationFound" : "NoViolationFound";
  return j.dump();
}

namespace {

int first_argmax(const Vec& v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = static_cast<int>(i);
  return best;
}

}  // namespace

OracleReport grid_check(const Network& net_r, const Network& net_t, const InputBox& box,
                        const EquivProperty& prop, const OracleConfig& cfg) {
  const int dim = box.dim();
  double grid_points = std::pow(static_cast<double>(cfg.resolution), dim);
  if (grid_points > static_cast<double>(cfg.budget))
    throw std::runtime_error("grid budget exceeded (" + std::to_string(cfg.resolution) + "^" +
                             std::to_string(dim) + " points); use a coarser resolution");

  OracleReport report;
  auto probe = [&](const Vec& x) {
    Vec yr = net_r.eval(x);
    Vec yt = net_t.eval(x);
    double dev = 0.0;
    for (std::size_t i = 0; i < yr.size(); ++i) dev = std::max(dev, std::fabs(yr[i] - yt[i]));
    if (dev > report.worst_deviation || report.samples == 0) {
      report.worst_deviation = dev;
      report.worst_x = x;
    }
    if (prop.kind == EquivProperty::Kind::Top1 && yr.size() >= 2) {
      int ar = first_argmax(yr);
      int at = first_argmax(yt);
      if (ar != at && yr[ar] > yr[at] && yt[at] > yt[ar]) {
        ++report.argmax_disagreements;
        if (!report.violation_found) {
          report.violation_found = true;
          report.worst_x = x;
        }
      }
    }
    if (prop.kind == EquivProperty::Kind::Epsilon && dev >= prop.epsilon)
      report.violation_found = true;
    ++report.samples;
  };

  // Full grid, row-major over dimensions.
  Vec x(dim);
  std::vector<int> idx(dim, 0);
  long total = static_cast<long>(grid_points);
  for (long p = 0; p < total; ++p) {
    for (int d = 0; d < dim; ++d) {
      double t = cfg.resolution == 1 ? 0.5 : static_cast<double>(idx[d]) / (cfg.resolution - 1);
      x[d] = box.lo[d] + t * (box.hi[d] - box.lo[d]);
    }
    probe(x);
    for (int d = 0; d < dim; ++d) {
      if (++idx[d] < cfg.resolution) break;
      idx[d] = 0;
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int p = 0; p < cfg.random_samples; ++p) {
    for (int d = 0; d < dim; ++d) x[d] = box.lo[d] + unit(rng) * (box.hi[d] - box.lo[d]);
    probe(x);
  }
  return report;
}

DepthTable min_depth_oracle(const Network& net_r, const Network& net_t, const InputBox& box,
                            const EquivProperty& prop, double timeout_seconds) {
  EngineConfig cfg;
  cfg.property = prop;
  cfg.strategy = StrategyKind::FirstRefineApproxLP;
  cfg.timeout_seconds = timeout_seconds;
  cfg.workers = 1;
  EnumerationResult res = enumerate_equivalence(net_r, net_t, box, cfg);
  if (res.verdict.kind == Verdict::Kind::Timeout)
    throw std::runtime_error("depth-recording run timed out");
  return DepthTable::from_run(res.stats);
}

}  // namespace nnequiv
