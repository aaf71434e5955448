#pragma once

#include <cstddef>
#include <random>
#include <string>

#include "ecto/autodiff/ops.hpp"
#include "ecto/autodiff/optim.hpp"

namespace ecto::model {

using ad::ParameterMap;
using ad::Tensor;

struct Linear {
  Tensor weight;  // [out, in]
  Tensor bias;    // [out], undefined for bias-free layers

  static Linear init(std::size_t in, std::size_t out, std::mt19937_64& rng, bool with_bias = true);
  Tensor operator()(const Tensor& x) const { return ad::linear(x, weight, bias); }
  void collect(ParameterMap& out, const std::string& prefix) const;
};

/// Linear → GELU → Linear.
struct Mlp {
  Linear first;
  Linear second;

  static Mlp init(std::size_t in, std::size_t hidden, std::size_t out, std::mt19937_64& rng, bool with_bias = true);
  Tensor operator()(const Tensor& x) const { return second(ad::gelu(first(x))); }
  void collect(ParameterMap& out, const std::string& prefix) const;
};

struct LayerNorm {
  Tensor gamma;
  Tensor beta;

  static LayerNorm init(std::size_t dim);
  Tensor operator()(const Tensor& x) const { return ad::layer_norm(x, gamma, beta); }
  void collect(ParameterMap& out, const std::string& prefix) const;
};

/// Trainable tensor filled with a constant.
Tensor constant_parameter(ad::Shape shape, double value);

}  // namespace ecto::model
