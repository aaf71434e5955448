#include "ecto/model/ecto.hpp"

#include <cstring>
#include <stdexcept>

#include "ecto/autodiff/init.hpp"
#include "ecto/util/io.hpp"

namespace ecto::model {

namespace {

constexpr char kMagic[8] = {'E', 'C', 'T', 'O', 'C', 'K', 'P', 'T'};
constexpr int kFormatVersion = 1;

std::vector<double> row(const Tensor& t, std::size_t i) {
  const std::size_t width = t.dim(1);
  const auto data = t.data();
  return {data.begin() + static_cast<std::ptrdiff_t>(i * width),
          data.begin() + static_cast<std::ptrdiff_t>((i + 1) * width)};
}

}  // namespace

RegimeTrace ForecastBundle::trace(std::size_t i) const {
  RegimeTrace t;
  if (!route.defined()) return t;
  t.route = row(route, i);
  t.gain = row(gain, i);
  t.bias = row(bias, i);
  for (double g : t.gain) t.mean_gain += g;
  for (double b : t.bias) t.mean_bias += b;
  t.mean_gain /= static_cast<double>(t.gain.size());
  t.mean_bias /= static_cast<double>(t.bias.size());
  t.dominant = dominant_regime(t.route);
  return t;
}

EctoModel::EctoModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_ = with_ablation(config_, config_.ablation);
  config_.validate();
  auto tok_rng = ad::derive_stream(seed, "init/tokenizer");
  auto pgvs_rng = ad::derive_stream(seed, "init/pgvs");
  auto fusion_rng = ad::derive_stream(seed, "init/fusion");
  auto head_rng = ad::derive_stream(seed, "init/head");
  auto ecrr_rng = ad::derive_stream(seed, "init/ecrr");
  tokenizer = Tokenizer(config_, tok_rng);
  pgvs = Pgvs(config_, pgvs_rng);
  fusion = Fusion(config_, fusion_rng);
  head = DualHead(config_, head_rng);
  ecrr = Ecrr(config_, ecrr_rng);
}

ForecastBundle EctoModel::forward(const Tensor& x_target, const Tensor& x_exogenous,
                                  std::mt19937_64* dropout_rng) const {
  const Ablation ab = config_.ablation;
  const std::size_t B = x_target.dim(0);
  if (x_exogenous.rank() != 3 || x_exogenous.dim(0) != B) {
    throw ad::DimensionError("forward: exogenous input " + ad::shape_str(x_exogenous.shape()) +
                             " does not match batch " + std::to_string(B));
  }
  ForecastBundle out;
  const auto enc = tokenizer(x_target, dropout_rng);
  out.target_state = enc.state;

  Tensor fused;
  if (ab == Ablation::TargetOnly) {
    if (x_exogenous.dim(2) != config_.num_variables()) {
      throw ad::DimensionError("forward: expected " + std::to_string(config_.num_variables()) +
                               " exogenous variables, got " + std::to_string(x_exogenous.dim(2)));
    }
    out.exo_summary = Tensor::zeros({B, config_.d_model});
    fused = fusion.without_context(enc.tokens);
  } else {
    const auto sel = pgvs(enc.state, x_exogenous);
    out.exo_summary = sel.summary;
    out.group_weights = sel.group_weights;
    out.variable_weights = sel.variable_weights;
    out.hier_weights = sel.hier_weights;
    fused = fusion(enc.tokens, sel.context);
  }
  out.base = head(fused, dropout_rng);

  if (ab == Ablation::NoEcrr) {
    out.regime = out.final = out.base;
    return out;
  }
  auto q = ad::concat_last({enc.state, out.exo_summary});
  if (dropout_rng) q = ad::dropout(q, config_.calibration_dropout, true, *dropout_rng);

  if (ab == Ablation::NoRegime) {
    out.regime = out.base;
  } else {
    out.route = ecrr.route(q);
    const auto mixed = ecrr.mix(q, out.route);
    out.regime = ecrr.refine_regime(out.base, mixed);
    ad::NoGradGuard no_grad;
    out.gain = ad::mul(ad::sigmoid(ecrr.gamma_gain), ad::tanh(mixed.gain));
    out.bias = ad::mul(ad::sigmoid(ecrr.gamma_bias), mixed.bias);
  }
  out.final = ab == Ablation::NoHorizon ? out.regime : ecrr.refine_horizon(out.regime, q);
  return out;
}

ParameterMap EctoModel::parameters() const {
  ParameterMap out;
  const bool exogenous = config_.ablation != Ablation::TargetOnly;
  tokenizer.collect(out, "tokenizer");
  if (exogenous) pgvs.collect(out, "pgvs");
  fusion.collect(out, "fusion", exogenous);
  head.collect(out, "head");
  ecrr.collect(out, "ecrr");
  return out;
}

void copy_parameters(const ParameterMap& from, ParameterMap& to) {
  if (from.size() != to.size()) throw std::runtime_error("parameter sets differ in size");
  for (auto& [name, dst] : to) {
    auto it = from.find(name);
    if (it == from.end()) throw std::runtime_error("missing parameter '" + name + "'");
    if (it->second.shape() != dst.shape()) throw std::runtime_error("shape mismatch for parameter '" + name + "'");
    auto src = it->second.data();
    std::copy(src.begin(), src.end(), dst.mutable_data().begin());
  }
}

std::string serialize_checkpoint(const EctoModel& model, const CheckpointMeta& meta) {
  const auto params = model.parameters();
  nlohmann::json table = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : params) {
    table.push_back({{"name", name}, {"shape", t.shape()}, {"dtype", "f64"}, {"offset", offset}});
    offset += t.size();
  }
  const nlohmann::json header{{"format", kFormatVersion},
                              {"config", model.config().to_json()},
                              {"parameters", table},
                              {"values", offset},
                              {"extra", meta.extra}};
  const std::string header_text = header.dump();
  const std::uint64_t header_len = header_text.size();

  std::string bytes;
  bytes.reserve(sizeof kMagic + sizeof header_len + header_text.size() + offset * sizeof(double));
  bytes.append(kMagic, sizeof kMagic);
  bytes.append(reinterpret_cast<const char*>(&header_len), sizeof header_len);
  bytes.append(header_text);
  for (const auto& [name, t] : params) {
    const auto data = t.data();
    bytes.append(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(double));
  }
  return bytes;
}

void save_checkpoint(const EctoModel& model, const std::filesystem::path& path, const CheckpointMeta& meta) {
  util::write_file_atomic(path, serialize_checkpoint(model, meta));
}

LoadedCheckpoint deserialize_checkpoint(const std::string& bytes) {
  std::uint64_t header_len = 0;
  if (bytes.size() < sizeof kMagic + sizeof header_len || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error("not an ECTO checkpoint (bad magic)");
  }
  std::memcpy(&header_len, bytes.data() + sizeof kMagic, sizeof header_len);
  const std::size_t body = sizeof kMagic + sizeof header_len;
  if (bytes.size() < body + header_len) throw std::runtime_error("checkpoint header truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(body, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  if (header.value("format", 0) != kFormatVersion) throw std::runtime_error("unsupported checkpoint format");

  LoadedCheckpoint out{EctoModel(ModelConfig::from_json(header.at("config")), 0), {}};
  out.meta.extra = header.value("extra", nlohmann::json::object());
  const std::size_t total = header.at("values").get<std::size_t>();
  const char* values = bytes.data() + body + header_len;
  if (bytes.size() != body + header_len + total * sizeof(double)) {
    throw std::runtime_error("checkpoint payload has wrong size");
  }
  auto params = out.model.parameters();
  const auto& table = header.at("parameters");
  if (table.size() != params.size()) {
    throw std::runtime_error("checkpoint lists " + std::to_string(table.size()) + " parameters, model has " +
                             std::to_string(params.size()));
  }
  for (const auto& entry : table) {
    const auto name = entry.at("name").get<std::string>();
    auto it = params.find(name);
    if (it == params.end()) throw std::runtime_error("checkpoint parameter '" + name + "' unknown to the model");
    const auto shape = entry.at("shape").get<ad::Shape>();
    if (shape != it->second.shape()) {
      throw std::runtime_error("parameter '" + name + "' has shape " + ad::shape_str(shape) + " in the checkpoint, " +
                               ad::shape_str(it->second.shape()) + " in the model");
    }
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    auto dst = it->second.mutable_data();
    if (offset + dst.size() > total) throw std::runtime_error("parameter '" + name + "' runs past the payload");
    std::memcpy(dst.data(), values + offset * sizeof(double), dst.size() * sizeof(double));
  }
  return out;
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(util::read_file(path));
}

}  // namespace ecto::model
