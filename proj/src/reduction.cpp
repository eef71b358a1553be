#include "nnequiv/reduction.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nnequiv {

using nlohmann::json;

void NetVerifyInstance::validate() const {
  net.validate();
  box.validate();
  if (box.dim() != net.input_dim())
    throw DimensionError("instance box dimension does not match the network input");
  if (c1.rows() != static_cast<int>(b1.size()))
    throw DimensionError("c1 rows != b1 length");
  if (c2.rows() != static_cast<int>(b2.size()))
    throw DimensionError("c2 rows != b2 length");
  if (c1.rows() > 0 && c1.cols() != net.input_dim())
    throw DimensionError("c1 columns != network input dimension");
  if (c2.rows() > 0 && c2.cols() != net.output_dim())
    throw DimensionError("c2 columns != network output dimension");
  if (c1.rows() + c2.rows() == 0)
    throw std::invalid_argument(
        "degenerate instance: no constraints on either side (d_max undefined)");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be a positive finite number");
}

namespace {

Vec json_vec(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  Vec v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError(where + ": expected a number");
    v.push_back(e.get<double>());
  }
  return v;
}

Mat json_mat(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected a 2d array");
  Mat m;
  for (std::size_t i = 0; i < j.size(); ++i)
    m.append_row(json_vec(j[i], where + " row " + std::to_string(i)));
  return m;
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(json(m.row_vec(i)));
  return rows;
}

}  // namespace

NetVerifyInstance NetVerifyInstance::parse(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance json: ") + e.what());
  }
  for (const char* key : {"net", "epsilon", "box"})
    if (!j.contains(key)) throw ParseError(std::string("instance json: missing \"") + key + "\"");
  NetVerifyInstance inst;
  inst.net = parse_network(j["net"].dump());
  inst.box = parse_box(j["box"].dump());
  inst.epsilon = j["epsilon"].get<double>();
  if (j.contains("c1")) inst.c1 = json_mat(j["c1"], "c1");
  if (j.contains("b1")) inst.b1 = json_vec(j["b1"], "b1");
  if (j.contains("c2")) inst.c2 = json_mat(j["c2"], "c2");
  if (j.contains("b2")) inst.b2 = json_vec(j["b2"], "b2");
  inst.validate();
  return inst;
}

NetVerifyInstance NetVerifyInstance::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string NetVerifyInstance::serialize() const {
  json j;
  j["net"] = json::parse(serialize_network(net));
  j["c1"] = mat_json(c1);
  j["b1"] = b1;
  j["c2"] = mat_json(c2);
  j["b2"] = b2;
  j["epsilon"] = epsilon;
  j["box"] = json::parse(serialize_box(box));
  return j.dump(2);
}

std::pair<Layer, Layer> relumax_gadget(const Vec& a_row, double a_bias, const Vec& b_row,
                                       double b_bias) {
  if (a_row.size() != b_row.size())
    throw DimensionError("relumax gadget rows must share the preceding layer");
  const int w = static_cast<int>(a_row.size());

  // Layer 1: [relu(b - a), relu(a), relu(-a)].
  Layer first;
  first.activation = Activation::ReLU;
  first.weights = Mat(3, w);
  first.bias = {b_bias - a_bias, a_bias, -a_bias};
  for (int j = 0; j < w; ++j) {
    first.weights(0, j) = b_row[j] - a_row[j];
    first.weights(1, j) = a_row[j];
    first.weights(2, j) = -a_row[j];
  }

  // Layer 2: relu(u + a) with a reconstructed from its relu pair.
  Layer second;
  second.activation = Activation::ReLU;
  second.weights = Mat(1, 3);
  second.bias = {0.0};
  second.weights(0, 0) = 1.0;
  second.weights(0, 1) = 1.0;
  second.weights(0, 2) = -1.0;

  return {std::move(first), std::move(second)};
}

EquivPair build_equiv_instance(const NetVerifyInstance& inst) {
  inst.validate();
  const Network& n = inst.net;
  const int p = static_cast<int>(n.layers.size());
  const int out_dim = n.output_dim();
  const int m1 = inst.c1.rows();
  const int m2 = inst.c2.rows();
  const double eps = inst.epsilon;

  Network t;

  // N's own layers, with the input-constraint slacks computed at layer 0 and
  // carried along. Slack values stay non-negative once any ReLU touched
  // them, so plain identity rows carry them through every stage.
  for (int k = 0; k < p; ++k) {
    const Layer& src = n.layers[k];
    Layer l;
    l.activation = src.activation;
    if (k == 0) {
      l.weights = Mat(src.out_dim() + m1, src.in_dim());
      l.bias.assign(src.out_dim() + m1, 0.0);
      for (int i = 0; i < src.out_dim(); ++i) {
        for (int j = 0; j < src.in_dim(); ++j) l.weights(i, j) = src.weights(i, j);
        l.bias[i] = src.bias[i];
      }
      for (int i = 0; i < m1; ++i) {
        for (int j = 0; j < src.in_dim(); ++j)
          l.weights(src.out_dim() + i, j) = inst.c1(i, j);
        l.bias[src.out_dim() + i] = eps - inst.b1[i];
      }
    } else {
      l.weights = Mat(src.out_dim() + m1, src.in_dim() + m1);
      l.bias.assign(src.out_dim() + m1, 0.0);
      for (int i = 0; i < src.out_dim(); ++i) {
        for (int j = 0; j < src.in_dim(); ++j) l.weights(i, j) = src.weights(i, j);
        l.bias[i] = src.bias[i];
      }
      for (int i = 0; i < m1; ++i) l.weights(src.out_dim() + i, src.in_dim() + i) = 1.0;
    }
    t.layers.push_back(std::move(l));
  }

  // Split y into its relu pair, emit the output-constraint slacks, keep the
  // input slacks. Layout after this layer: [y+ (O), y- (O), s_out, s_in].
  {
    Layer l;
    l.activation = Activation::ReLU;
    l.weights = Mat(2 * out_dim + m2 + m1, out_dim + m1);
    l.bias.assign(2 * out_dim + m2 + m1, 0.0);
    for (int i = 0; i < out_dim; ++i) {
      l.weights(i, i) = 1.0;
      l.weights(out_dim + i, i) = -1.0;
    }
    for (int i = 0; i < m2; ++i) {
      for (int j = 0; j < out_dim; ++j) l.weights(2 * out_dim + i, j) = inst.c2(i, j);
      l.bias[2 * out_dim + i] = eps - inst.b2[i];
    }
    for (int i = 0; i < m1; ++i) l.weights(2 * out_dim + m2 + i, out_dim + i) = 1.0;
    t.layers.push_back(std::move(l));
  }

  // relumax pyramid over all slacks. Two ReLU layers per round; values
  // are non-negative so max(0,a,b) == max(a,b) and carries are identity.
  int width = 2 * out_dim + m2 + m1;
  std::vector<int> slacks(m1 + m2);
  for (int i = 0; i < m1 + m2; ++i) slacks[i] = 2 * out_dim + i;

  while (slacks.size() > 1) {
    const int pairs = static_cast<int>(slacks.size()) / 2;
    const bool odd = slacks.size() % 2 != 0;

    // Round layer 1: [y+, y-, (a_i, u_i = relu(b_i - a_i)) per pair, leftover].
    Layer la;
    la.activation = Activation::ReLU;
    la.weights = Mat(2 * out_dim + 2 * pairs + (odd ? 1 : 0), width);
    la.bias.assign(la.weights.rows(), 0.0);
    for (int i = 0; i < 2 * out_dim; ++i) la.weights(i, i) = 1.0;
    for (int q = 0; q < pairs; ++q) {
      int a = slacks[2 * q], b = slacks[2 * q + 1];
      la.weights(2 * out_dim + 2 * q, a) = 1.0;
      la.weights(2 * out_dim + 2 * q + 1, a) = -1.0;
      la.weights(2 * out_dim + 2 * q + 1, b) = 1.0;
    }
    if (odd) la.weights(la.weights.rows() - 1, slacks.back()) = 1.0;
    width = la.weights.rows();
    t.layers.push_back(std::move(la));

    // Round layer 2: [y+, y-, v_i = relu(a_i + u_i), leftover].
    Layer lb;
    lb.activation = Activation::ReLU;
    lb.weights = Mat(2 * out_dim + pairs + (odd ? 1 : 0), width);
    lb.bias.assign(lb.weights.rows(), 0.0);
    for (int i = 0; i < 2 * out_dim; ++i) lb.weights(i, i) = 1.0;
    for (int q = 0; q < pairs; ++q) {
      lb.weights(2 * out_dim + q, 2 * out_dim + 2 * q) = 1.0;
      lb.weights(2 * out_dim + q, 2 * out_dim + 2 * q + 1) = 1.0;
    }
    if (odd) lb.weights(lb.weights.rows() - 1, width - 1) = 1.0;
    width = lb.weights.rows();
    t.layers.push_back(std::move(lb));

    std::vector<int> next;
    for (int q = 0; q < pairs; ++q) next.push_back(2 * out_dim + q);
    if (odd) next.push_back(width - 1);
    slacks = std::move(next);
  }

  // d* = relu(2*eps - d_max); y pair carried.
  {
    Layer l;
    l.activation = Activation::ReLU;
    l.weights = Mat(2 * out_dim + 1, width);
    l.bias.assign(2 * out_dim + 1, 0.0);
    for (int i = 0; i < 2 * out_dim; ++i) l.weights(i, i) = 1.0;
    l.weights(2 * out_dim, slacks[0]) = -1.0;
    l.bias[2 * out_dim] = 2.0 * eps;
    width = 2 * out_dim + 1;
    t.layers.push_back(std::move(l));
  }

  // Final linear layer: y reassembled, d* added to coordinate 0 only
  // (sufficient under the Chebyshev norm, and keeps T small).
  {
    Layer l;
    l.activation = Activation::Linear;
    l.weights = Mat(out_dim, width);
    l.bias.assign(out_dim, 0.0);
    for (int i = 0; i < out_dim; ++i) {
      l.weights(i, i) = 1.0;
      l.weights(i, out_dim + i) = -1.0;
    }
    l.weights(0, 2 * out_dim) = 1.0;
    t.layers.push_back(std::move(l));
  }

  t.validate();
  return EquivPair{n, std::move(t)};
}

}  // namespace nnequiv
