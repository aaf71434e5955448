#include "ecto/model/config.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

namespace ecto::model {

namespace {

constexpr std::array<std::pair<Ablation, const char*>, 9> kAblations{{
    {Ablation::None, "none"},
    {Ablation::TargetOnly, "target-only"},
    {Ablation::OneGroup, "one-group"},
    {Ablation::NoPgvs, "no-pgvs"},
    {Ablation::NoGroupScoring, "no-group-scoring"},
    {Ablation::NoTopK, "no-topk"},
    {Ablation::NoEcrr, "no-ecrr"},
    {Ablation::NoRegime, "no-regime"},
    {Ablation::NoHorizon, "no-horizon"},
}};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string to_string(Ablation a) {
  for (const auto& [value, name] : kAblations)
    if (value == a) return name;
  return "none";
}

Ablation parse_ablation(const std::string& name) {
  for (const auto& [value, text] : kAblations)
    if (name == text) return value;
  throw ConfigError("unknown ablation '" + name + "'");
}

const std::vector<std::string>& ablation_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [value, name] : kAblations) out.emplace_back(name);
    return out;
  }();
  return names;
}

std::size_t ModelConfig::num_tokens() const {
  const std::size_t padded = lookback + 2 * token_padding();
  if (token_stride == 0 || padded < token_kernel) return 0;
  return (padded - token_kernel) / token_stride + 1;
}

void ModelConfig::validate() const {
  require(lookback > 0, "lookback must be positive");
  require(horizon > 0 && horizon % 2 == 0, "horizon must be even (dual heads), got " + std::to_string(horizon));
  require(d_model > 0 && d_model % 2 == 0, "d_model must be positive and even");
  require(local_channels > 0, "local_channels must be positive");
  require(local_kernel % 2 == 1, "local_kernel must be odd for length-preserving padding");
  require(token_kernel % 2 == 0 && token_kernel > 0, "token_kernel must be even");
  require(token_stride >= 1 && token_stride < token_kernel, "token_stride must satisfy 1 <= s < token_kernel");
  require(num_tokens() > 0, "token kernel wider than the padded lookback");
  require(regimes >= 1, "regimes must be >= 1");
  require(short_window >= 1 && short_window < long_window && long_window <= lookback,
          "windows must satisfy 1 <= short_window < long_window <= lookback");
  require(top_k >= 1, "top_k must be >= 1");
  require(heads >= 1 && d_model % heads == 0, "d_model must be divisible by heads");
  require(ffn_multiplier >= 1, "ffn_multiplier must be >= 1");
  require(rank() >= 1, "scorer rank must be positive");
  require(group_temperature > 0.0 && variable_temperature > 0.0, "temperatures must be positive");
  for (double rate : {embedding_dropout, calibration_dropout, head_dropout})
    require(rate >= 0.0 && rate < 1.0, "dropout rates must lie in [0, 1)");
  require(!variable_names.empty(), "at least one exogenous variable is required");
  require(group_names.size() == groups.size(), "group names and groups differ in count");
  std::vector<int> seen(num_variables(), 0);
  for (const auto& g : groups) {
    require(!g.empty(), "empty variable group");
    for (auto m : g) {
      require(m < num_variables(), "group member out of range");
      ++seen[m];
    }
  }
  require(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }),
          "groups must partition the exogenous variables");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"lookback", lookback},
          {"horizon", horizon},
          {"d_model", d_model},
          {"local_channels", local_channels},
          {"local_kernel", local_kernel},
          {"token_kernel", token_kernel},
          {"token_stride", token_stride},
          {"regimes", regimes},
          {"short_window", short_window},
          {"long_window", long_window},
          {"top_k", top_k},
          {"heads", heads},
          {"ffn_multiplier", ffn_multiplier},
          {"scorer_rank", rank()},
          {"group_temperature", group_temperature},
          {"variable_temperature", variable_temperature},
          {"embedding_dropout", embedding_dropout},
          {"calibration_dropout", calibration_dropout},
          {"head_dropout", head_dropout},
          {"gate_init", gate_init},
          {"variable_names", variable_names},
          {"group_names", group_names},
          {"groups", groups},
          {"ablation", to_string(ablation)}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& doc) {
  ModelConfig c;
  try {
    c.lookback = doc.value("lookback", c.lookback);
    c.horizon = doc.value("horizon", c.horizon);
    c.d_model = doc.value("d_model", c.d_model);
    c.local_channels = doc.value("local_channels", c.local_channels);
    c.local_kernel = doc.value("local_kernel", c.local_kernel);
    c.token_kernel = doc.value("token_kernel", c.token_kernel);
    c.token_stride = doc.value("token_stride", c.token_stride);
    c.regimes = doc.value("regimes", c.regimes);
    c.short_window = doc.value("short_window", c.short_window);
    c.long_window = doc.value("long_window", c.long_window);
    c.top_k = doc.value("top_k", c.top_k);
    c.heads = doc.value("heads", c.heads);
    c.ffn_multiplier = doc.value("ffn_multiplier", c.ffn_multiplier);
    c.scorer_rank = doc.value("scorer_rank", c.scorer_rank);
    c.group_temperature = doc.value("group_temperature", c.group_temperature);
    c.variable_temperature = doc.value("variable_temperature", c.variable_temperature);
    c.embedding_dropout = doc.value("embedding_dropout", c.embedding_dropout);
    c.calibration_dropout = doc.value("calibration_dropout", c.calibration_dropout);
    c.head_dropout = doc.value("head_dropout", c.head_dropout);
    c.gate_init = doc.value("gate_init", c.gate_init);
    c.variable_names = doc.value("variable_names", c.variable_names);
    c.group_names = doc.value("group_names", c.group_names);
    c.groups = doc.value("groups", c.groups);
    c.ablation = parse_ablation(doc.value("ablation", std::string("none")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model config: ") + e.what());
  }
  return c;
}

ModelConfig with_ablation(ModelConfig config, Ablation ablation) {
  config.ablation = ablation;
  if (ablation == Ablation::OneGroup || ablation == Ablation::NoPgvs) {
    std::vector<std::size_t> all(config.num_variables());
    std::iota(all.begin(), all.end(), 0);
    config.groups = {all};
    config.group_names = {"all"};
  }
  return config;
}

}  // namespace ecto::model
