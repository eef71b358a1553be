// Compiler from constraint-satisfiability instances (network N, input
// constraints C1 x <= b1, output constraints C2 y <= b2, tolerance eps) to
// equivalence-checking pairs (R, T): R is N verbatim, T augments N with
// slack outputs for every constraint, a relumax pyramid reducing them to
// d_max, and a final output g_N(x) + max(0, 2*eps - d_max) on coordinate 0.
// The pair deviates by >= eps exactly where every constraint is satisfied.

#pragma once

#include <string>
#include <utility>

#include "nnequiv/network.hpp"

namespace nnequiv {

struct NetVerifyInstance {
  Network net;
  Mat c1;  // m1 x I
  Vec b1;
  Mat c2;  // m2 x O
  Vec b2;
  double epsilon = 0.0;
  InputBox box;

  void validate() const;

  static NetVerifyInstance parse(const std::string& json_text);
  static NetVerifyInstance load(const std::string& path);
  std::string serialize() const;
};

// Two stacked ReLU layers computing relumax(a,b) = max(0, a + max(0, b-a))
// = max(0, a, b) for affine functions a, b of the preceding layer's values.
// The second layer has a single output.
std::pair<Layer, Layer> relumax_gadget(const Vec& a_row, double a_bias, const Vec& b_row,
                                       double b_bias);

struct EquivPair {
  Network r;
  Network t;
};

EquivPair build_equiv_instance(const NetVerifyInstance& inst);

}  // namespace nnequiv
