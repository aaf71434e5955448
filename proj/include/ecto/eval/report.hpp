#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecto/data/preprocess.hpp"
#include "ecto/eval/metrics.hpp"
#include "ecto/model/ecto.hpp"

namespace ecto::eval {

/// Forecasts of a model over a set of windows, in normalized and MW space,
/// together with the interpretability traces of each sample.
struct Predictions {
  std::size_t horizon = 0;
  std::vector<std::size_t> starts;
  std::vector<std::string> timestamps;    // first forecast step of each sample
  std::vector<double> prediction;         // [B, H] normalized
  std::vector<double> target;
  std::vector<double> prediction_mw;
  std::vector<double> target_mw;
  std::vector<double> persistence;
  std::vector<double> persistence_mw;
  std::vector<double> group_weights;      // [B, G], empty under target-only
  std::vector<double> variable_weights;   // [B, D]
  std::vector<double> hier_weights;       // [B, D]
  std::vector<model::RegimeTrace> traces; // empty when routing is disabled

  std::size_t samples() const { return horizon == 0 ? 0 : target.size() / horizon; }
};

Predictions predict(const model::EctoModel& model, const data::SeriesDataset& dataset,
                    const std::vector<std::size_t>& starts, const data::ExoScaler& scaler,
                    data::ExoNormalization mode, std::size_t batch_size = 256);

/// Persistence-only predictions for the same windows (no model needed).
Predictions predict_persistence(const data::SeriesDataset& dataset, const std::vector<std::size_t>& starts,
                                std::size_t lookback, std::size_t horizon);

struct EvalReport {
  std::size_t samples = 0;
  std::size_t horizon = 0;
  PointMetrics model;
  PointMetrics persistence;
  std::vector<double> per_horizon_mse;              // normalized
  std::vector<double> persistence_per_horizon_mse;  // normalized
  ErrorDecomposition decomposition;                 // of the model, MW space
  DmResult dm;                                      // model vs persistence
  std::vector<double> model_losses;                 // per-sample horizon-mean squared error (normalized)
  std::vector<double> persistence_losses;

  std::vector<std::string> variable_names;
  std::vector<std::string> group_names;
  std::optional<model::SparsityStats> sparsity;     // mean of per-sample statistics of w^hier
  std::vector<double> mean_hier_weights;            // per variable
  std::vector<double> mean_group_weights;           // per group
  std::vector<model::RegimeSummary> regimes;
  std::optional<double> regime_separation;
  std::string run_id;                               // manifest reference, omitted when empty

  nlohmann::json to_json() const;
  /// report.json, per_horizon.csv, decomposition.csv, dm_acf.csv, sample_losses.csv.
  void write(const std::filesystem::path& dir) const;
};

EvalReport build_report(const Predictions& predictions, double rated_mw, const model::ModelConfig& config);

/// sample,timestamp,regime weights..., dominant, mean_gain, mean_bias
std::string regime_csv(const Predictions& predictions);
/// sample,timestamp,variable,group,group_weight,variable_weight,hier_weight
std::string selection_csv(const Predictions& predictions, const model::ModelConfig& config);
/// sample,timestamp,step,prediction_mw,target_mw
std::string forecast_csv(const Predictions& predictions);

/// Loads the per-sample losses written by EvalReport::write.
std::vector<double> read_sample_losses(const std::filesystem::path& csv, const std::string& column = "model");

}  // namespace ecto::eval
