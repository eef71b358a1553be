// Brute-force reference checks, independent of the set-propagation engine:
// dense grid plus random sampling of both networks, and the depth-table
// recorder behind strategy O.

#pragma once

#include <cstdint>
#include <string>

#include "nnequiv/network.hpp"
#include "nnequiv/property.hpp"
#include "nnequiv/refinement.hpp"

namespace nnequiv {

struct OracleReport {
  long samples = 0;
  double worst_deviation = 0.0;
  Vec worst_x;
  long argmax_disagreements = 0;
  bool violation_found = false;

  std::string to_json() const;
};

struct OracleConfig {
  int resolution = 25;           // grid points per input dimension
  long budget = 2000000;         // max grid points (resolution^I)
  int random_samples = 10000;    // uniform supplement, always on
  std::uint64_t seed = 0;
};

// Evaluates both networks on the full grid plus the random supplement and
// reports the worst case. Sampling can only refute, never prove.
OracleReport grid_check(const Network& net_r, const Network& net_t, const InputBox& box,
                        const EquivProperty& prop, const OracleConfig& cfg = {});

// Strategy-A run with depth recording; the emitted table drives OracleReplay.
// Throws on timeout.
DepthTable min_depth_oracle(const Network& net_r, const Network& net_t, const InputBox& box,
                            const EquivProperty& prop, double timeout_seconds);

}  // namespace nnequiv
