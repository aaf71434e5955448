#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ecto/model/config.hpp"
#include "ecto/model/layers.hpp"

namespace ecto::model {

inline constexpr std::size_t kExoStats = 6;

/// Per-variable two-scale descriptors [μ_s, σ_s, last, μ_l, σ_l, last]
/// (population std) for x: [B, T, D] stored row-major. Returns [B, D, 6].
std::vector<double> exogenous_statistics(std::span<const double> x, std::size_t batch, std::size_t lookback,
                                         std::size_t channels, std::size_t short_window, std::size_t long_window);

struct ExoEncoding {
  Tensor features;    // f: [B, D, 6]
  Tensor embeddings;  // S: [B, D, d]
};

struct SelectionResult {
  Tensor group_summaries;  // s̄: [B, G, d]
  Tensor group_logits;     // π / τ_g: [B, G]
  Tensor group_weights;    // w^G: [B, G]
  Tensor variable_logits;  // [B, D]
  Tensor variable_weights; // α: [B, D]
  Tensor hier_weights;     // w^hier: [B, D]
  Tensor context;          // C: [B, G, d]
  Tensor summary;          // z_exo: [B, d]
};

/// π = vᵀ tanh(W_h h + W_s s + W_hs (W_proj h ⊙ s)), bias-free.
struct BilinearScorer {
  Linear w_h;     // d → r
  Linear w_s;     // d → r
  Linear w_hs;    // d → r
  Linear w_proj;  // d → d
  Linear v;       // r → 1

  static BilinearScorer init(std::size_t d, std::size_t r, std::mt19937_64& rng);
  /// h: [B, d], s: [B, M, d] → [B, M].
  Tensor operator()(const Tensor& h, const Tensor& s) const;
  void collect(ParameterMap& out, const std::string& prefix) const;
};

/// Physically grouped sparse variable selection.
class Pgvs {
 public:
  Pgvs() = default;
  Pgvs(const ModelConfig& config, std::mt19937_64& rng);

  /// x_exo: [B, T, D] (a constant input; statistics carry no gradient).
  ExoEncoding encode(const Tensor& x_exo) const;
  /// Group means of the variable embeddings, S: [B, D, d] → [B, G, d].
  Tensor group_summaries(const Tensor& embeddings) const;
  /// Sparsemax group weights, h: [B, d], s̄: [B, G, d] → [B, G].
  Tensor score_groups(const Tensor& h_tar, const Tensor& summaries) const;
  /// Variable weights, hierarchical weights, context and summary given w^G.
  SelectionResult select_variables(const Tensor& h_tar, const Tensor& embeddings, const Tensor& summaries,
                                   const Tensor& group_weights) const;
  /// The full module, honouring the configured ablation.
  SelectionResult operator()(const Tensor& h_tar, const Tensor& x_exo) const;

  void collect(ParameterMap& out, const std::string& prefix) const;

  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }

  Mlp exo_mlp;                 // 6 → d → d
  BilinearScorer group_scorer;
  BilinearScorer variable_scorer;

 private:
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<std::size_t> group_of_;       // variable → group
  std::vector<double> average_matrix_;      // [G, D], rows average members
  std::vector<double> membership_matrix_;   // [G, D], 0/1
  std::size_t lookback_ = 0;
  std::size_t short_window_ = 0;
  std::size_t long_window_ = 0;
  std::size_t top_k_ = 2;
  double group_temperature_ = 1.0;
  double variable_temperature_ = 1.0;
  Ablation ablation_ = Ablation::None;
};

struct SparsityStats {
  double active = 0.0;              // #{d : w_d > 1/D}
  double perplexity = 0.0;          // exp(H)
  double normalized_entropy = 0.0;  // H / ln D
};

/// 0·ln 0 is taken as 0.
SparsityStats sparsity_stats(std::span<const double> weights);

}  // namespace ecto::model
