#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecto/data/preprocess.hpp"
#include "ecto/data/synthetic.hpp"
#include "ecto/model/config.hpp"
#include "ecto/train/trainer.hpp"

namespace ecto::cli {

enum ExitCode : int { kOk = 0, kUsageError = 2, kDataError = 3, kNumericError = 4 };

/// Everything a command can be configured with. On disk this is one JSON
/// document with optional sections; omitted keys keep their defaults and
/// unknown keys are rejected:
///
///   {"seed": 42,
///    "model": {"lookback": 96, "horizon": 16, "d_model": 256, ...},
///    "training": {"batch_size": 256, "peak_lr": 2e-4, ...},
///    "data": {"split": {"train": 0.7, "val": 0.1, "test": 0.2},
///             "exo_normalization": "global", "max_interpolation_gap": 32,
///             "fill_limit": 8},
///    "synthetic": {"length": 20000, ...}}
///
/// `seed` is the only source of randomness: it replaces the seeds of the
/// training and synthetic sections. Variable names and groups always come
/// from the data schema, never from the file.
struct RunConfig {
  std::uint64_t seed = 42;
  model::ModelConfig model;
  train::TrainConfig training;
  data::SplitFractions split;
  data::ExoNormalization exo_normalization = data::ExoNormalization::Global;
  data::RepairConfig repair;
  data::SyntheticConfig synthetic = data::default_synthetic_config();

  /// Overlays `doc` on the current values.
  void merge(const nlohmann::json& doc);
  /// Re-applies `seed` to every section and validates ranges.
  void finalize();
  nlohmann::json to_json() const;

  static RunConfig load(const std::filesystem::path& path);
};

std::string to_string(data::ExoNormalization mode);
data::ExoNormalization parse_exo_normalization(const std::string& name);

/// Root directory for run outputs: the explicit flag if given, else
/// $ECTO_OUTPUT_DIR, else "ecto-runs" in the working directory.
std::filesystem::path output_root(const std::string& flag);

/// Runs one command line. Output that a user reads goes to `out`,
/// diagnostics to `err`. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace ecto::cli
