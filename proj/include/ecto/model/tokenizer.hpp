#pragma once

#include <random>

#include "ecto/model/config.hpp"
#include "ecto/model/layers.hpp"

namespace ecto::model {

inline constexpr std::size_t kTargetStats = 6;

struct TargetEncoding {
  Tensor features;     // local feature map H: [B, c, T]
  Tensor tokens;       // [B, N, d], positional embeddings added, after embedding dropout
  Tensor token_mean;   // [B, d], mean over tokens after positional addition, before dropout
  Tensor stats;        // s_tar: [B, 6]
  Tensor state;        // h_tar: [B, d]
};

/// Descriptive statistics of each (normalized) target window: mean, std, min,
/// max and range over the whole window, and the least-squares slope over the
/// last `short_window` steps. x: [B, T] → [B, 6].
Tensor target_statistics(const Tensor& x, std::size_t short_window);

/// Hierarchical convolutional tokenizer. Both convolutions pad by repeating
/// the edge values, so a constant window yields identical tokens.
class Tokenizer {
 public:
  Tokenizer() = default;
  Tokenizer(const ModelConfig& config, std::mt19937_64& rng);

  /// x_tar: [B, T]. `dropout_rng` null means evaluation mode.
  TargetEncoding operator()(const Tensor& x_tar, std::mt19937_64* dropout_rng) const;
  void collect(ParameterMap& out, const std::string& prefix) const;

  Tensor local_kernels;   // [c, 1, k1]
  Tensor local_bias;      // [c]
  Tensor token_kernels;   // [d, c, k2]
  Tensor token_bias;      // [d]
  Tensor positional;      // [N, d]
  Linear pool;            // 3c → d
  Mlp state_mlp;          // 2d + 6 → d → d

 private:
  std::size_t lookback_ = 0;
  std::size_t local_kernel_ = 0;
  std::size_t token_stride_ = 0;
  std::size_t token_padding_ = 0;
  std::size_t short_window_ = 0;
  double dropout_ = 0.0;
};

}  // namespace ecto::model
