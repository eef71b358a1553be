// Feed-forward ReLU network model: on-disk JSON format, validation and
// concrete evaluation. Networks are immutable after load and safe to share
// across workers.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nnequiv/linalg.hpp"

namespace nnequiv {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Activation { ReLU, Linear };

struct Layer {
  Mat weights;  // out_dim x in_dim
  Vec bias;     // out_dim
  Activation activation = Activation::Linear;

  int in_dim() const { return weights.cols(); }
  int out_dim() const { return weights.rows(); }
};

struct Network {
  std::vector<Layer> layers;

  int input_dim() const { return layers.front().in_dim(); }
  int output_dim() const { return layers.back().out_dim(); }
  int relu_count() const;

  // Throws DimensionError/ParseError if any invariant is broken:
  // consecutive dims chain, all entries finite, final layer linear.
  void validate() const;

  Vec eval(const Vec& x) const;
};

struct InputBox {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  void validate() const;
};

// JSON schema:
//   {"layers":[{"weights":[[...]],"bias":[...],"activation":"relu"|"linear"}]}
Network parse_network(const std::string& json_text);
Network load_network(const std::string& path);
std::string serialize_network(const Network& net);
void save_network(const Network& net, const std::string& path);

// {"lo":[...],"hi":[...]}
InputBox parse_box(const std::string& json_text);
InputBox load_box(const std::string& path);
std::string serialize_box(const InputBox& box);

}  // namespace nnequiv
