#include "ecto/model/layers.hpp"

#include "ecto/autodiff/init.hpp"

namespace ecto::model {

Linear Linear::init(std::size_t in, std::size_t out, std::mt19937_64& rng, bool with_bias) {
  Linear l;
  l.weight = ad::fan_in_uniform({out, in}, in, rng);
  if (with_bias) l.bias = Tensor::zeros({out}, true);
  return l;
}

void Linear::collect(ParameterMap& out, const std::string& prefix) const {
  out.emplace(prefix + ".weight", weight);
  if (bias.defined()) out.emplace(prefix + ".bias", bias);
}

Mlp Mlp::init(std::size_t in, std::size_t hidden, std::size_t out, std::mt19937_64& rng, bool with_bias) {
  return {Linear::init(in, hidden, rng, with_bias), Linear::init(hidden, out, rng, with_bias)};
}

void Mlp::collect(ParameterMap& out, const std::string& prefix) const {
  first.collect(out, prefix + ".0");
  second.collect(out, prefix + ".1");
}

LayerNorm LayerNorm::init(std::size_t dim) { return {Tensor::full({dim}, 1.0, true), Tensor::zeros({dim}, true)}; }

void LayerNorm::collect(ParameterMap& out, const std::string& prefix) const {
  out.emplace(prefix + ".gamma", gamma);
  out.emplace(prefix + ".beta", beta);
}

Tensor constant_parameter(ad::Shape shape, double value) { return Tensor::full(std::move(shape), value, true); }

}  // namespace ecto::model
