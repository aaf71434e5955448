#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ecto/model/config.hpp"
#include "ecto/model/layers.hpp"

namespace ecto::model {

struct ExpertMix {
  Tensor gain;  // g^mix: [B, H]
  Tensor bias;  // b^mix: [B, H]
};

/// Regime refinement: soft routing over K gain/bias experts applied through
/// sigmoid-gated FiLM, then a gated per-horizon additive correction.
class Ecrr {
 public:
  Ecrr() = default;
  Ecrr(const ModelConfig& config, std::mt19937_64& rng);

  /// q: [B, d_s + d_e] → r: [B, K].
  Tensor route(const Tensor& q) const;
  /// Router logits W_r q + b_r.
  Tensor route_logits(const Tensor& q) const;
  /// Per-expert outputs, each [B, K, H].
  Tensor expert_gains(const Tensor& q) const { return reshape_experts(gain_heads(q)); }
  Tensor expert_biases(const Tensor& q) const { return reshape_experts(bias_heads(q)); }
  ExpertMix mix(const Tensor& q, const Tensor& r) const;
  /// (1 + σ(γ_g)⊙tanh(g^mix))⊙ŷ_base + σ(γ_b)⊙b^mix.
  Tensor refine_regime(const Tensor& base, const ExpertMix& mixed) const;
  /// Per-step corrections δ: [B, H].
  Tensor horizon_corrections(const Tensor& q) const;
  /// ŷ_regime + σ(γ_h)⊙δ.
  Tensor refine_horizon(const Tensor& regime, const Tensor& q) const;

  void collect(ParameterMap& out, const std::string& prefix) const;

  Linear router;      // q → K
  Linear gain_heads;  // q → K·H
  Linear bias_heads;  // q → K·H
  Tensor gamma_gain;  // [H]
  Tensor gamma_bias;  // [H]
  Tensor gamma_horizon;  // [H]
  Tensor horizon_embedding;  // E_h: [H, d_h]
  Mlp context_mlp;    // q → d_h → d_h
  Mlp delta_mlp;      // d_h → d_h/2 → 1

 private:
  Tensor reshape_experts(const Tensor& flat) const;

  std::size_t regimes_ = 4;
  std::size_t horizon_ = 16;
  Ablation ablation_ = Ablation::None;
};

/// Per-sample routing summary used for interpretability exports.
struct RegimeTrace {
  std::vector<double> route;     // K
  std::vector<double> gain;      // σ(γ_g)⊙tanh(g^mix): H
  std::vector<double> bias;      // σ(γ_b)⊙b^mix: H
  double mean_gain = 0.0;
  double mean_bias = 0.0;
  std::size_t dominant = 0;      // argmax r, ties → lower index
};

struct RegimeSummary {
  double dominant_percent = 0.0;
  double mean_weight = 0.0;
  double mean_gain = 0.0;   // over samples dominated by this regime; NaN if none
  double mean_bias = 0.0;
  std::size_t count = 0;
};

std::size_t dominant_regime(std::span<const double> route);

/// Per-regime dominance share, mean soft weight over all samples, and mean
/// gain/bias of the samples each regime dominates. Throws on empty input.
std::vector<RegimeSummary> regime_statistics(const std::vector<RegimeTrace>& traces);

/// Distance between the (mean gain, mean bias) centroids of the two most
/// frequently dominant regimes divided by the pooled within-cluster RMS
/// distance to the own centroid. Returns NaN when fewer than two regimes
/// dominate any sample.
double regime_separation(const std::vector<RegimeTrace>& traces);

}  // namespace ecto::model
