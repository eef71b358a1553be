#include "nnequiv/property.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "nnequiv/network.hpp"

namespace nnequiv {

EquivProperty EquivProperty::make_epsilon(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("epsilon must be a positive finite number");
  EquivProperty p;
  p.kind = Kind::Epsilon;
  p.epsilon = eps;
  return p;
}

EquivProperty EquivProperty::make_top1() {
  EquivProperty p;
  p.kind = Kind::Top1;
  return p;
}

EquivProperty EquivProperty::parse(const std::string& text) {
  if (text == "top1") return make_top1();
  if (text.rfind("epsilon:", 0) == 0) {
    std::string num = text.substr(8);
    try {
      std::size_t used = 0;
      double eps = std::stod(num, &used);
      if (used != num.size()) throw std::invalid_argument("trailing characters");
      return make_epsilon(eps);
    } catch (const std::exception&) {
      throw ParseError("bad epsilon value in property \"" + text + "\"");
    }
  }
  throw ParseError("unknown property \"" + text + "\" (expected epsilon:<float> or top1)");
}

std::string EquivProperty::to_string() const {
  if (kind == Kind::Top1) return "top1";
  return "epsilon:" + std::to_string(epsilon);
}

std::string Counterexample::to_json() const {
  nlohmann::json j;
  j["x"] = x;
  j["y_r"] = y_r;
  j["y_t"] = y_t;
  if (kind == EquivProperty::Kind::Epsilon) {
    j["deviation"] = deviation;
  } else {
    j["argmax_r"] = argmax_r;
    j["argmax_t"] = argmax_t;
  }
  return j.dump();
}

std::string Verdict::kind_string() const {
  switch (kind) {
    case Kind::Equivalent: return "equivalent";
    case Kind::NotEquivalent: return "not-equivalent";
    case Kind::Timeout: return "timeout";
  }
  return "?";
}

}  // namespace nnequiv
