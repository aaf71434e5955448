#pragma once

#include <random>

#include "ecto/model/config.hpp"
#include "ecto/model/layers.hpp"

namespace ecto::model {

/// Gated cross-attention from target tokens to group contexts followed by a
/// feed-forward block:
///   C' = Linear(C);  A = Attn(LN(T), C', C')
///   U  = T + σ(η)·Proj(A);  T_fused = U + FFN(U)
/// Everything downstream of C is bias-free, so C = 0 gives exactly T + FFN(T).
class Fusion {
 public:
  Fusion() = default;
  Fusion(const ModelConfig& config, std::mt19937_64& rng);

  /// tokens: [B, N, d]; context: [B, G, d].
  Tensor operator()(const Tensor& tokens, const Tensor& context) const;
  /// Cross-attention output A before projection and gating.
  Tensor attend(const Tensor& tokens, const Tensor& context) const;
  /// T + FFN(T): the fusion result when no exogenous context is present.
  Tensor without_context(const Tensor& tokens) const;
  Tensor feed_forward(const Tensor& x) const { return ffn(x); }
  void collect(ParameterMap& out, const std::string& prefix, bool with_attention = true) const;

  Linear context_proj;  // d_e → d, bias-free
  LayerNorm query_norm;
  Linear q_proj;
  Linear k_proj;        // bias-free
  Linear v_proj;        // bias-free
  Linear out_proj;      // bias-free
  Mlp proj;             // d → d → d, bias-free
  Tensor eta;           // [1]
  Mlp ffn;              // d → m·d → d

 private:
  std::size_t heads_ = 4;
};

/// Dual-horizon head: two dropout + linear heads on the flattened tokens,
/// the first producing steps 1..H/2 and the second H/2+1..H.
class DualHead {
 public:
  DualHead() = default;
  DualHead(const ModelConfig& config, std::mt19937_64& rng);

  /// fused: [B, N, d] → [B, H].
  Tensor operator()(const Tensor& fused, std::mt19937_64* dropout_rng) const;
  void collect(ParameterMap& out, const std::string& prefix) const;

  Linear short_head;
  Linear long_head;

 private:
  double dropout_ = 0.3;
};

}  // namespace ecto::model
