#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <vector>

#include <json.hpp>

#include "ecto/autodiff/tensor.hpp"
#include "ecto/data/preprocess.hpp"
#include "ecto/model/ecto.hpp"

namespace ecto::train {

struct TrainConfig {
  std::size_t batch_size = 256;
  double peak_lr = 2e-4;
  double pct_start = 0.3;
  std::size_t max_epochs = 50;
  std::size_t patience = 10;
  double lambda = 0.05;
  std::uint64_t seed = 42;
  std::size_t steps_per_epoch = 0;  // 0: one pass over the training windows
  std::size_t max_steps = 0;        // 0: no cap besides max_epochs
  std::size_t eval_batch_size = 256;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are an error.
  static TrainConfig from_json(const nlohmann::json& doc);
};

/// Split datasets, their window start rows and the exogenous scaler fitted on
/// the training split.
struct WindowedData {
  data::SeriesDataset train;
  data::SeriesDataset val;
  data::SeriesDataset test;
  data::ExoScaler scaler;
  data::ExoNormalization exo_mode = data::ExoNormalization::Global;
  std::vector<std::size_t> train_starts;
  std::vector<std::size_t> val_starts;
  std::vector<std::size_t> test_starts;
  std::size_t lookback = 96;
  std::size_t horizon = 16;
};

/// Splits a repaired dataset chronologically and enumerates windows in each
/// split. Throws data::DataError if any split has no complete window.
WindowedData prepare_windows(const data::SeriesDataset& dataset, std::size_t lookback, std::size_t horizon,
                             const data::SplitFractions& fractions = {},
                             data::ExoNormalization exo_mode = data::ExoNormalization::Global);

struct BatchTensors {
  ad::Tensor x_target;     // [B, T]
  ad::Tensor x_exogenous;  // [B, T, D]
  ad::Tensor y;            // [B, H]
};

BatchTensors to_tensors(const data::Batch& batch);

/// Stops once the number of consecutive epochs without strict improvement
/// exceeds `patience`.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}
  /// Records the loss of `epoch` (1-based). Returns true if training should stop.
  bool update(std::size_t epoch, double loss);
  bool improved() const { return improved_; }
  double best_loss() const { return best_; }
  std::size_t best_epoch() const { return best_epoch_; }

 private:
  std::size_t patience_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t best_epoch_ = 0;
  std::size_t streak_ = 0;
  bool improved_ = false;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t steps = 0;  // cumulative optimizer steps
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;        // at the last step of the epoch
  bool improved = false;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  double initial_val_loss = 0.0;
  double best_val_loss = 0.0;
  std::size_t best_epoch = 0;
  std::size_t steps = 0;
  bool stopped_early = false;
};

/// Training failed with a non-finite loss or gradient.
class TrainingDiverged : public ad::NumericError {
 public:
  using ad::NumericError::NumericError;
};

/// Composite loss of the model in evaluation mode over the given windows.
double evaluate_loss(const model::EctoModel& model, const data::SeriesDataset& dataset,
                     const std::vector<std::size_t>& starts, const data::ExoScaler& scaler,
                     data::ExoNormalization mode, double lambda, std::size_t batch_size);

/// Adam with a one-cycle schedule, validation after every epoch and early
/// stopping. On return the model holds the best-validation parameters.
TrainResult train(model::EctoModel& model, const WindowedData& data, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// epoch,steps,train_loss,val_loss,lr,improved
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace ecto::train
