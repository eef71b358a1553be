#include "nnequiv/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nnequiv {

using nlohmann::json;

int Network::relu_count() const {
  int n = 0;
  for (const Layer& l : layers)
    if (l.activation == Activation::ReLU) n += l.out_dim();
  return n;
}

void Network::validate() const {
  if (layers.empty()) throw ParseError("network has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Layer& l = layers[k];
    std::string where = "layer " + std::to_string(k);
    if (l.weights.rows() == 0 || l.weights.cols() == 0)
      throw ParseError(where + ": empty weight matrix");
    if (l.weights.rows() != static_cast<int>(l.bias.size()))
      throw DimensionError(where + ": weight rows " + std::to_string(l.weights.rows()) +
                           " != bias length " + std::to_string(l.bias.size()));
    for (double v : l.weights.data())
      if (!std::isfinite(v)) throw ParseError(where + ": non-finite weight entry");
    for (double v : l.bias)
      if (!std::isfinite(v)) throw ParseError(where + ": non-finite bias entry");
    if (k > 0 && l.in_dim() != layers[k - 1].out_dim())
      throw DimensionError(where + ": in_dim " + std::to_string(l.in_dim()) +
                           " does not match layer " + std::to_string(k - 1) + " out_dim " +
                           std::to_string(layers[k - 1].out_dim()));
  }
  if (layers.back().activation != Activation::Linear)
    throw ParseError("final layer must be linear (trailing relu is not supported)");
}

Vec Network::eval(const Vec& x) const {
  if (static_cast<int>(x.size()) != input_dim())
    throw DimensionError("eval: input length " + std::to_string(x.size()) +
                         " != network input_dim " + std::to_string(input_dim()));
  Vec v = x;
  for (const Layer& l : layers) {
    v = matvec(l.weights, v, &l.bias);
    if (l.activation == Activation::ReLU) kern::relu(v.data(), v.size());
  }
  return v;
}

void InputBox::validate() const {
  if (lo.empty() || lo.size() != hi.size())
    throw DimensionError("input box: lo/hi length mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw ParseError("input box: non-finite bound at dim " + std::to_string(i));
    if (lo[i] > hi[i])
      throw ParseError("input box: lo > hi at dim " + std::to_string(i));
  }
}

namespace {

Vec parse_vec(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  Vec v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw ParseError(where + ": expected a number");
    v.push_back(e.get<double>());
  }
  return v;
}

Mat parse_mat(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty 2d array");
  Mat m;
  std::size_t width = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Vec row = parse_vec(j[i], where + " row " + std::to_string(i));
    if (i == 0) width = row.size();
    if (row.size() != width || width == 0)
      throw ParseError(where + ": ragged or empty rows");
    m.append_row(row);
  }
  return m;
}

json vec_to_json(const Vec& v) { return json(v); }

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) rows.push_back(json(m.row_vec(i)));
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Network parse_network(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("network json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("layers"))
    throw ParseError("network json: missing \"layers\"");
  Network net;
  const json& layers = j["layers"];
  if (!layers.is_array()) throw ParseError("network json: \"layers\" must be an array");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const json& jl = layers[k];
    std::string where = "layer " + std::to_string(k);
    Layer l;
    if (!jl.contains("weights") || !jl.contains("bias") || !jl.contains("activation"))
      throw ParseError(where + ": needs weights, bias and activation");
    l.weights = parse_mat(jl["weights"], where + " weights");
    l.bias = parse_vec(jl["bias"], where + " bias");
    std::string act = jl["activation"].get<std::string>();
    if (act == "relu") l.activation = Activation::ReLU;
    else if (act == "linear") l.activation = Activation::Linear;
    else throw ParseError(where + ": unknown activation \"" + act + "\"");
    net.layers.push_back(std::move(l));
  }
  net.validate();
  return net;
}

Network load_network(const std::string& path) {
  try {
    return parse_network(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(path + ": " + e.what());
  }
}

std::string serialize_network(const Network& net) {
  json j;
  j["layers"] = json::array();
  for (const Layer& l : net.layers) {
    json jl;
    jl["weights"] = mat_to_json(l.weights);
    jl["bias"] = vec_to_json(l.bias);
    jl["activation"] = l.activation == Activation::ReLU ? "relu" : "linear";
    j["layers"].push_back(std::move(jl));
  }
  return j.dump(2);
}

void save_network(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path);
  out << serialize_network(net) << "\n";
}

InputBox parse_box(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("box json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi"))
    throw ParseError("box json: needs \"lo\" and \"hi\"");
  InputBox box;
  box.lo = parse_vec(j["lo"], "box lo");
  box.hi = parse_vec(j["hi"], "box hi");
  box.validate();
  return box;
}

InputBox load_box(const std::string& path) {
  try {
    return parse_box(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string serialize_box(const InputBox& box) {
  json j;
  j["lo"] = vec_to_json(box.lo);
  j["hi"] = vec_to_json(box.hi);
  return j.dump(2);
}

}  // namespace nnequiv
