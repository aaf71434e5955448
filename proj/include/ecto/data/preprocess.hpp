#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ecto/data/dataset.hpp"

namespace ecto::data {

struct RepairConfig {
  std::size_t max_interpolation_gap = 32;  // inclusive
  std::size_t fill_limit = 8;
};

struct RepairReport {
  std::size_t interpolated = 0;
  std::size_t forward_filled = 0;
  std::size_t backward_filled = 0;
  std::size_t rows_dropped = 0;
};

/// Gap repair for one column, in place: linear interpolation across internal
/// gaps of at most max_interpolation_gap steps, then forward fill and
/// backward fill of the remaining gaps, each limited to fill_limit steps.
/// Whatever is still missing stays NaN.
RepairReport repair_series(std::vector<double>& series, const RepairConfig& config = {});

/// Repairs every column, then drops rows that are still missing anywhere
/// (their timestamps go with them). Throws DataError if a column has no
/// observed value at all.
RepairReport repair_gaps(SeriesDataset& dataset, const RepairConfig& config = {});

struct SplitFractions {
  double train = 0.7;
  double val = 0.1;
  double test = 0.2;
};

struct DatasetSplits {
  SeriesDataset train;
  SeriesDataset val;
  SeriesDataset test;
};

/// Contiguous segments [0, ⌊f_train·n⌋), [⌊f_train·n⌋, ⌊(f_train+f_val)·n⌋),
/// [⌊(f_train+f_val)·n⌋, n). Throws if a segment is shorter than min_length.
DatasetSplits chronological_split(const SeriesDataset& dataset, const SplitFractions& fractions = {},
                                  std::size_t min_length = 0);

/// Start rows s such that rows [s, s + lookback + horizon) are consecutive
/// grid points. On a gap-free dataset of length n this is every s in
/// [0, n − lookback − horizon].
std::vector<std::size_t> window_starts(const SeriesDataset& dataset, std::size_t lookback, std::size_t horizon);

inline constexpr double kStdFloor = 1e-5;

/// Instance statistics of a target window (population std, floored).
struct NormStats {
  double mean = 0.0;
  double std = 1.0;
  bool floored = false;
};

NormStats window_stats(std::span<const double> window);
std::vector<double> normalize_window(std::span<const double> window, const NormStats& stats);
std::vector<double> denormalize_forecast(std::span<const double> forecast, const NormStats& stats);

enum class ExoNormalization { Global, PerWindow };

/// Per-channel z-score statistics fitted on the training split.
struct ExoScaler {
  std::vector<double> mean;
  std::vector<double> std;

  static ExoScaler fit(const SeriesDataset& train);
  static ExoScaler identity(std::size_t channels);
};

/// A batch of windows in model layout. Target windows and futures are
/// normalized with each input window's own statistics.
struct Batch {
  std::size_t size = 0;
  std::size_t lookback = 0;
  std::size_t horizon = 0;
  std::size_t channels = 0;
  std::vector<std::size_t> starts;
  std::vector<double> x_target;     // [B, T]
  std::vector<double> x_exogenous;  // [B, T, D]
  std::vector<double> y;            // [B, H]
  std::vector<double> y_mw;         // [B, H]
  std::vector<double> last_mw;      // [B]
  std::vector<NormStats> stats;     // [B]
  std::size_t floored_windows = 0;
};

Batch make_batch(const SeriesDataset& dataset, std::span<const std::size_t> starts, std::size_t lookback,
                 std::size_t horizon, const ExoScaler& scaler, ExoNormalization mode = ExoNormalization::Global);

}  // namespace ecto::data
