#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecto/autodiff/tensor.hpp"

namespace ecto::eval {

/// mean((ŷ − y)²) + λ·mean(|ŷ − y|) over all elements.
ad::Tensor composite_loss(const ad::Tensor& prediction, const ad::Tensor& target, double lambda);

/// Nash–Sutcliffe efficiency; empty when y is constant.
std::optional<double> nse(std::span<const double> prediction, std::span<const double> target);

/// Normalized-space error metrics plus MW-space RMSE and bias.
struct PointMetrics {
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> nse;
  double rmse_mw = 0.0;
  double mbe_mw = 0.0;
};

PointMetrics point_metrics(std::span<const double> prediction, std::span<const double> target,
                           std::span<const double> prediction_mw, std::span<const double> target_mw);

/// Mean squared error per horizon step for [B, H] row-major buffers.
std::vector<double> per_horizon_mse(std::span<const double> prediction, std::span<const double> target,
                                    std::size_t horizon);

/// Repeats the last value of the window over the horizon.
std::vector<double> persistence_forecast(std::span<const double> window, std::size_t horizon);

/// One row of a decomposition table. `mse_mw2` is empty for cells without samples.
struct CellError {
  std::string label;
  std::size_t count = 0;
  std::optional<double> mse_mw2;
};

struct ErrorDecomposition {
  std::vector<CellError> power_bins;    // by mean true power over the horizon, % of rated
  std::vector<CellError> ramp_classes;  // Ramp Up / Ramp Down / Stable by net change y_H − y_1
  std::vector<double> per_horizon_mse_mw2;
  double overall_mse_mw2 = 0.0;
};

inline constexpr double kRampThresholdMw = 5.0;

/// Splits MW-space errors of [B, H] forecasts into power-level bins
/// {0–5, 5–20, 20–50, 50–80, 80–100}% of rated and ramp classes.
ErrorDecomposition decompose_errors(std::span<const double> prediction_mw, std::span<const double> target_mw,
                                    std::size_t horizon, double rated_mw);

/// Bartlett kernel weight 1 − j/h (zero for j ≥ h).
double bartlett_weight(std::size_t lag, std::size_t bandwidth);

/// Sample autocovariance at `lag` (divisor n).
double autocovariance(std::span<const double> series, std::size_t lag);

/// Autocorrelation for lags 0..max_lag; all zero for a constant series.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

/// γ₀ + 2 Σ_{j=1}^{h−1} (1 − j/h) γ_j.
double newey_west_variance(std::span<const double> series, std::size_t bandwidth);

struct DmResult {
  std::optional<double> statistic;  // empty when the loss differential has no variance
  std::optional<double> p_value;    // two-sided, standard normal
  double mean_differential = 0.0;
  double hac_variance = 0.0;
  std::size_t samples = 0;
  std::size_t bandwidth = 0;
  std::vector<double> acf;          // of d, lags 0..4h
};

/// Diebold–Mariano test on per-sample losses; d = loss_a − loss_b, so a
/// negative statistic favours `a`.
DmResult diebold_mariano(std::span<const double> loss_a, std::span<const double> loss_b, std::size_t bandwidth);

/// Horizon-mean squared error of each [B, H] sample.
std::vector<double> sample_losses(std::span<const double> prediction, std::span<const double> target,
                                  std::size_t horizon);

}  // namespace ecto::eval
