#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "ecto/model/config.hpp"
#include "ecto/model/ecrr.hpp"
#include "ecto/model/fusion.hpp"
#include "ecto/model/pgvs.hpp"
#include "ecto/model/tokenizer.hpp"

namespace ecto::model {

/// Everything one forward pass produces. Forecasts are in normalized space.
/// Selection tensors are undefined under TargetOnly; routing tensors are
/// undefined when regime refinement is disabled.
struct ForecastBundle {
  Tensor base;              // [B, H]
  Tensor regime;            // [B, H]
  Tensor final;             // [B, H]
  Tensor target_state;      // h_tar: [B, d]
  Tensor exo_summary;       // z_exo: [B, d]
  Tensor group_weights;     // [B, G]
  Tensor variable_weights;  // [B, D]
  Tensor hier_weights;      // [B, D]
  Tensor route;             // [B, K]
  Tensor gain;              // σ(γ_g)⊙tanh(g^mix): [B, H]
  Tensor bias;              // σ(γ_b)⊙b^mix: [B, H]

  std::size_t batch() const { return final.dim(0); }
  /// Routing summary of sample i; empty route when routing is disabled.
  RegimeTrace trace(std::size_t i) const;
};

class EctoModel {
 public:
  /// Initializes every parameter from streams derived from `seed`.
  EctoModel(ModelConfig config, std::uint64_t seed);

  /// x_target: [B, T] normalized windows; x_exogenous: [B, T, D].
  /// `dropout_rng` null runs in evaluation mode.
  ForecastBundle forward(const Tensor& x_target, const Tensor& x_exogenous, std::mt19937_64* dropout_rng) const;

  /// Trainable parameters, by stable dotted name. Modules an ablation
  /// switches off are excluded.
  ParameterMap parameters() const;
  const ModelConfig& config() const { return config_; }

  Tokenizer tokenizer;
  Pgvs pgvs;
  Fusion fusion;
  DualHead head;
  Ecrr ecrr;

 private:
  ModelConfig config_;
};

/// Extra state stored alongside the parameters.
struct CheckpointMeta {
  nlohmann::json extra = nlohmann::json::object();
};

/// Binary container: magic "ECTOCKPT", u64 header length, JSON header
/// (config, parameter table with name/shape/dtype/offset, extra metadata),
/// then raw little-endian float64 parameter data.
void save_checkpoint(const EctoModel& model, const std::filesystem::path& path, const CheckpointMeta& meta = {});
std::string serialize_checkpoint(const EctoModel& model, const CheckpointMeta& meta = {});

struct LoadedCheckpoint {
  EctoModel model;
  CheckpointMeta meta;
};

/// Throws std::runtime_error on malformed files or parameter mismatches.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);
LoadedCheckpoint deserialize_checkpoint(const std::string& bytes);

/// Copies values between parameter maps of identical layout.
void copy_parameters(const ParameterMap& from, ParameterMap& to);

}  // namespace ecto::model
