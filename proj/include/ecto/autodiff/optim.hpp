#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ecto/autodiff/tensor.hpp"

namespace ecto::ad {

/// Ordered name → parameter table. Iteration order (lexicographic by name) is
/// the canonical order used by the optimizer and checkpoints.
using ParameterMap = std::map<std::string, Tensor>;

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OneCycleConfig {
  double peak_lr = 2e-4;
  double pct_start = 0.3;
  double div_start = 25.0;
  double div_final = 1e4;
  std::size_t total_steps = 1;
};

/// Per-parameter moment buffers plus schedule bookkeeping.
struct OptimizerState {
  std::map<std::string, std::vector<double>> first_moment;
  std::map<std::string, std::vector<double>> second_moment;
  std::uint64_t step = 0;
  OneCycleConfig schedule;
};

OptimizerState make_optimizer_state(const ParameterMap& params, OneCycleConfig schedule = {});

/// One bias-corrected Adam update using the gradients currently stored on
/// each parameter. Parameters without a gradient buffer are treated as
/// having zero gradient.
void adam_step(ParameterMap& params, OptimizerState& state, double lr, const AdamConfig& config = {});

/// Cosine one-cycle schedule: warm up from peak/div_start to peak over
/// round(pct_start·total) steps, then anneal to peak/div_final at `total`.
double onecycle_lr(std::size_t step, std::size_t total_steps, double peak_lr, double pct_start,
                   double div_start = 25.0, double div_final = 1e4);

}  // namespace ecto::ad
