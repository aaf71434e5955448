#include <cstdlib>
#include <set>

#include "ecto/cli/app.hpp"
#include "ecto/util/io.hpp"

namespace ecto::cli {

namespace {

void reject_unknown(const nlohmann::json& doc, const nlohmann::json& known, const std::string& section,
                    const std::set<std::string>& forbidden = {}) {
  if (!doc.is_object()) throw std::invalid_argument("config section '" + section + "' must be an object");
  for (const auto& [key, value] : doc.items()) {
    if (forbidden.count(key)) {
      throw std::invalid_argument("config key '" + section + "." + key + "' is taken from the data schema");
    }
    if (!known.contains(key)) throw std::invalid_argument("unknown config key '" + section + "." + key + "'");
  }
}

nlohmann::json model_json(const model::ModelConfig& m) {
  auto j = m.to_json();
  j["scorer_rank"] = m.scorer_rank;
  j.erase("variable_names");
  j.erase("group_names");
  j.erase("groups");
  return j;
}

nlohmann::json data_json(const RunConfig& c) {
  return {{"split", {{"train", c.split.train}, {"val", c.split.val}, {"test", c.split.test}}},
          {"exo_normalization", to_string(c.exo_normalization)},
          {"max_interpolation_gap", c.repair.max_interpolation_gap},
          {"fill_limit", c.repair.fill_limit}};
}

}  // namespace

std::string to_string(data::ExoNormalization mode) {
  return mode == data::ExoNormalization::Global ? "global" : "per-window";
}

data::ExoNormalization parse_exo_normalization(const std::string& name) {
  if (name == "global") return data::ExoNormalization::Global;
  if (name == "per-window") return data::ExoNormalization::PerWindow;
  throw std::invalid_argument("exo_normalization must be 'global' or 'per-window', got '" + name + "'");
}

void RunConfig::merge(const nlohmann::json& doc) {
  reject_unknown(doc, {{"seed", 0}, {"model", 0}, {"training", 0}, {"data", 0}, {"synthetic", 0}}, "root");
  try {
    if (doc.contains("seed")) seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("model")) {
      auto j = model_json(model);
      reject_unknown(doc.at("model"), j, "model", {"variable_names", "group_names", "groups"});
      j.update(doc.at("model"));
      model = model::ModelConfig::from_json(j);
    }
    if (doc.contains("training")) {
      auto j = training.to_json();
      reject_unknown(doc.at("training"), j, "training");
      j.update(doc.at("training"));
      training = train::TrainConfig::from_json(j);
    }
    if (doc.contains("data")) {
      const auto& d = doc.at("data");
      reject_unknown(d, data_json(*this), "data");
      if (d.contains("split")) {
        const auto& s = d.at("split");
        reject_unknown(s, data_json(*this).at("split"), "data.split");
        split.train = s.value("train", split.train);
        split.val = s.value("val", split.val);
        split.test = s.value("test", split.test);
      }
      if (d.contains("exo_normalization")) {
        exo_normalization = parse_exo_normalization(d.at("exo_normalization").get<std::string>());
      }
      repair.max_interpolation_gap = d.value("max_interpolation_gap", repair.max_interpolation_gap);
      repair.fill_limit = d.value("fill_limit", repair.fill_limit);
    }
    if (doc.contains("synthetic")) {
      auto j = data::to_json(synthetic);
      reject_unknown(doc.at("synthetic"), j, "synthetic");
      j.update(doc.at("synthetic"));
      synthetic = data::synthetic_config_from_json(j);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  } catch (const data::DataError& e) {
    throw std::invalid_argument(e.what());
  }
}

void RunConfig::finalize() {
  training.seed = seed;
  synthetic.seed = seed;
  training = train::TrainConfig::from_json(training.to_json());
  const double sum = split.train + split.val + split.test;
  if (!(split.train > 0.0 && split.val > 0.0 && split.test > 0.0) || std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("data.split fractions must be positive and sum to 1");
  }
}

nlohmann::json RunConfig::to_json() const {
  auto synth = data::to_json(synthetic);
  return {{"seed", seed},
          {"model", model_json(model)},
          {"training", training.to_json()},
          {"data", data_json(*this)},
          {"synthetic", synth}};
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  RunConfig c;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(util::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  c.merge(doc);
  return c;
}

std::filesystem::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ECTO_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "ecto-runs";
}

}  // namespace ecto::cli
