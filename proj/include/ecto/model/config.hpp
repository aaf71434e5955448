#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ecto::model {

/// Inconsistent architecture hyperparameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ablation variants. Each one disables exactly one mechanism:
///   TargetOnly      no exogenous input at all (zero context, zero summary)
///   OneGroup        every variable in a single group
///   NoPgvs          uniform variable weights 1/D, single context row
///   NoGroupScoring  uniform group weights 1/G
///   NoTopK          no top-k mask inside groups
///   NoEcrr          final forecast is the base forecast
///   NoRegime        gain/bias modulation closed
///   NoHorizon       horizon correction closed
enum class Ablation { None, TargetOnly, OneGroup, NoPgvs, NoGroupScoring, NoTopK, NoEcrr, NoRegime, NoHorizon };

std::string to_string(Ablation a);
/// Accepts the names produced by to_string ("none", "target-only", ...).
Ablation parse_ablation(const std::string& name);
const std::vector<std::string>& ablation_names();

struct ModelConfig {
  std::size_t lookback = 96;
  std::size_t horizon = 16;
  std::size_t d_model = 256;
  std::size_t local_channels = 32;
  std::size_t local_kernel = 5;
  std::size_t token_kernel = 16;
  std::size_t token_stride = 8;
  std::size_t regimes = 4;
  std::size_t short_window = 12;
  std::size_t long_window = 48;
  std::size_t top_k = 2;
  std::size_t heads = 4;
  std::size_t ffn_multiplier = 2;
  std::size_t scorer_rank = 0;  // 0: d_model / 2
  double group_temperature = 1.0;
  double variable_temperature = 1.0;
  double embedding_dropout = 0.1;
  double calibration_dropout = 0.1;
  double head_dropout = 0.3;
  double gate_init = -4.0;

  std::vector<std::string> variable_names;
  std::vector<std::string> group_names;
  std::vector<std::vector<std::size_t>> groups;
  Ablation ablation = Ablation::None;

  std::size_t num_variables() const { return variable_names.size(); }
  std::size_t num_groups() const { return groups.size(); }
  std::size_t rank() const { return scorer_rank == 0 ? d_model / 2 : scorer_rank; }
  std::size_t token_padding() const { return token_kernel / 2; }
  std::size_t num_tokens() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& doc);
};

/// Applies the structural part of an ablation (grouping changes) and records it.
ModelConfig with_ablation(ModelConfig config, Ablation ablation);

}  // namespace ecto::model
