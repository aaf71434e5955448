#include "ecto/cli/app.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "ecto/eval/report.hpp"
#include "ecto/model/ecto.hpp"
#include "ecto/util/io.hpp"

#ifndef ECTO_VERSION
#define ECTO_VERSION "unversioned"
#endif

namespace ecto::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// A per-run output directory named by the hash of everything that
/// determines its contents.
class Run {
 public:
  Run(const std::string& command, json config, json inputs, const std::string& root_flag)
      : start_(std::chrono::steady_clock::now()) {
    manifest_ = {{"command", command},
                 {"code_version", ECTO_VERSION},
                 {"seed", config.value("seed", json(nullptr))},
                 {"config", std::move(config)},
                 {"inputs", std::move(inputs)}};
    json key = manifest_;
    for (auto& [name, input] : key["inputs"].items()) input.erase("path");
    id_ = util::hex64(util::fnv1a64(key.dump()));
    manifest_["run_id"] = id_;
    dir_ = output_root(root_flag) / (command + "-" + id_);
    fs::create_directories(dir_);
  }

  const std::string& id() const { return id_; }
  const fs::path& dir() const { return dir_; }
  fs::path path(const std::string& name) {
    outputs_.push_back(name);
    return dir_ / name;
  }
  void set(const std::string& key, json value) { manifest_[key] = std::move(value); }

  void finish(std::ostream& out) {
    manifest_["outputs"] = outputs_;
    manifest_["timing"] = {
        {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()}};
    util::write_file_atomic(dir_ / "manifest.json", manifest_.dump(2) + "\n");
    out << "run directory: " << dir_.string() << "\n";
  }

 private:
  json manifest_;
  std::string id_;
  fs::path dir_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

json file_input(const fs::path& path) {
  return {{"path", path.string()}, {"fingerprint", util::hex64(util::fnv1a64(util::read_file(path)))}};
}

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "seed for every random stream");
  cmd->add_option("--output-dir", o.output_dir, "root for run directories (default: $ECTO_OUTPUT_DIR or ./ecto-runs)");
}

RunConfig base_config(const CommonOptions& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
  if (o.seed) c.seed = *o.seed;
  return c;
}

data::SeriesDataset load_dataset(const fs::path& data_path, const fs::path& schema_path, const data::RepairConfig& repair,
                                 std::uint64_t* fingerprint = nullptr) {
  auto ds = data::load_csv(data_path, data::Schema::load(schema_path));
  if (fingerprint) *fingerprint = data::fingerprint(ds);
  data::repair_gaps(ds, repair);
  return ds;
}

/// Data preparation settings a checkpoint was trained with.
struct Preparation {
  data::SplitFractions split;
  data::ExoNormalization exo_mode = data::ExoNormalization::Global;
  data::RepairConfig repair;
  data::ExoScaler scaler;
};

Preparation preparation_of(const model::LoadedCheckpoint& ckpt) {
  const auto& extra = ckpt.meta.extra;
  if (!extra.contains("data")) throw data::DataError("checkpoint carries no data preparation metadata");
  try {
    const auto& d = extra.at("data");
    Preparation p;
    p.split = {d.at("split").at("train").get<double>(), d.at("split").at("val").get<double>(),
               d.at("split").at("test").get<double>()};
    p.exo_mode = parse_exo_normalization(d.at("exo_normalization").get<std::string>());
    p.repair.max_interpolation_gap = d.at("max_interpolation_gap").get<std::size_t>();
    p.repair.fill_limit = d.at("fill_limit").get<std::size_t>();
    p.scaler.mean = d.at("scaler").at("mean").get<std::vector<double>>();
    p.scaler.std = d.at("scaler").at("std").get<std::vector<double>>();
    return p;
  } catch (const json::exception& e) {
    throw data::DataError(std::string("checkpoint data metadata is malformed: ") + e.what());
  }
}

void check_compatible(const model::ModelConfig& cfg, const data::SeriesDataset& ds) {
  if (ds.num_exogenous() != cfg.num_variables()) {
    throw data::DataError("exogenous channel count mismatch: checkpoint expects D=" +
                          std::to_string(cfg.num_variables()) + ", data has D=" + std::to_string(ds.num_exogenous()));
  }
  for (std::size_t d = 0; d < ds.num_exogenous(); ++d) {
    if (ds.exogenous_names[d] != cfg.variable_names[d]) {
      throw data::DataError("exogenous channel " + std::to_string(d) + " is '" + ds.exogenous_names[d] +
                            "' in the data but '" + cfg.variable_names[d] + "' in the checkpoint");
    }
  }
}

struct SplitData {
  data::SeriesDataset dataset;
  std::vector<std::size_t> starts;
};

SplitData select_split(const data::SeriesDataset& ds, const Preparation& prep, const model::ModelConfig& cfg,
                       const std::string& split) {
  auto splits = data::chronological_split(ds, prep.split, cfg.lookback + cfg.horizon);
  SplitData s;
  if (split == "train") s.dataset = std::move(splits.train);
  else if (split == "val") s.dataset = std::move(splits.val);
  else s.dataset = std::move(splits.test);
  s.starts = data::window_starts(s.dataset, cfg.lookback, cfg.horizon);
  if (s.starts.empty()) throw data::DataError(split + " split has no contiguous window");
  return s;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  CommonOptions common;
  std::optional<std::size_t> length;
};

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  auto cfg = base_config(o.common);
  if (o.length) cfg.synthetic.length = *o.length;
  cfg.finalize();
  cfg.synthetic = data::synthetic_config_from_json(data::to_json(cfg.synthetic));
  Run run("synth", cfg.to_json(), json::object(), o.common.output_dir);
  const auto series = data::synthesize_with_truth(cfg.synthetic);
  data::write_csv(series.dataset, run.path("data.csv"));
  data::schema_of(series.dataset).save(run.path("schema.json"));
  std::ostringstream truth;
  truth << "timestamp,regime,effective_wind\n";
  for (std::size_t t = 0; t < series.dataset.length(); ++t) {
    truth << data::format_timestamp(series.dataset.timestamps[t]) << ',' << series.regime[t] << ','
          << util::format_double(series.effective_wind[t]) << '\n';
  }
  util::write_file_atomic(run.path("truth.csv"), truth.str());
  run.set("dataset_fingerprint", util::hex64(data::fingerprint(series.dataset)));
  out << "synthesized " << series.dataset.length() << " rows with " << series.dataset.num_exogenous()
      << " exogenous channels\n";
  run.finish(out);
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  CommonOptions common;
  std::string data, schema, ablate;
  std::optional<std::size_t> horizon, lookback, d_model, epochs, patience, max_steps, steps_per_epoch, batch_size;
  std::optional<double> lr;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
  auto cfg = base_config(o.common);
  if (!o.ablate.empty()) cfg.model.ablation = model::parse_ablation(o.ablate);
  if (o.horizon) cfg.model.horizon = *o.horizon;
  if (o.lookback) cfg.model.lookback = *o.lookback;
  if (o.d_model) cfg.model.d_model = *o.d_model;
  if (o.epochs) cfg.training.max_epochs = *o.epochs;
  if (o.patience) cfg.training.patience = *o.patience;
  if (o.max_steps) cfg.training.max_steps = *o.max_steps;
  if (o.steps_per_epoch) cfg.training.steps_per_epoch = *o.steps_per_epoch;
  if (o.batch_size) cfg.training.batch_size = *o.batch_size;
  if (o.lr) cfg.training.peak_lr = *o.lr;
  cfg.finalize();

  std::uint64_t fp = 0;
  const auto ds = load_dataset(o.data, o.schema, cfg.repair, &fp);
  auto mc = cfg.model;
  mc.variable_names = ds.exogenous_names;
  mc.group_names.clear();
  mc.groups.clear();
  for (const auto& g : ds.groups) {
    mc.group_names.push_back(g.name);
    mc.groups.push_back(g.members);
  }
  model::EctoModel model(mc, cfg.seed);
  const auto windows = train::prepare_windows(ds, mc.lookback, mc.horizon, cfg.split, cfg.exo_normalization);

  Run run("train", cfg.to_json(), {{"data", file_input(o.data)}, {"schema", file_input(o.schema)}},
          o.common.output_dir);
  run.set("dataset_fingerprint", util::hex64(fp));
  out << "training " << model::to_string(mc.ablation) << " on " << windows.train_starts.size() << " windows ("
      << windows.val_starts.size() << " validation)\n";
  const auto result = train::train(model, windows, cfg.training, [&](const train::EpochRecord& r) {
    out << "epoch " << r.epoch << " steps " << r.steps << " train " << fixed(r.train_loss) << " val "
        << fixed(r.val_loss) << (r.improved ? " *" : "") << "\n";
  });

  model::CheckpointMeta meta;
  meta.extra = {{"run_id", run.id()},
                {"seed", cfg.seed},
                {"training", cfg.training.to_json()},
                {"data",
                 {{"split", {{"train", cfg.split.train}, {"val", cfg.split.val}, {"test", cfg.split.test}}},
                  {"exo_normalization", to_string(cfg.exo_normalization)},
                  {"max_interpolation_gap", cfg.repair.max_interpolation_gap},
                  {"fill_limit", cfg.repair.fill_limit},
                  {"scaler", {{"mean", windows.scaler.mean}, {"std", windows.scaler.std}}},
                  {"dataset_fingerprint", util::hex64(fp)}}},
                {"result",
                 {{"best_epoch", result.best_epoch},
                  {"best_val_loss", result.best_val_loss},
                  {"initial_val_loss", result.initial_val_loss},
                  {"steps", result.steps},
                  {"stopped_early", result.stopped_early}}}};
  model::save_checkpoint(model, run.path("checkpoint.ecto"), meta);
  util::write_file_atomic(run.path("history.csv"), train::history_csv(result.history));
  out << "best epoch " << result.best_epoch << " val " << fixed(result.best_val_loss) << " after " << result.steps
      << " steps" << (result.stopped_early ? " (early stop)" : "") << "\n";
  run.finish(out);
  return kOk;
}

// ------------------------------------------------------ eval / interpret

struct EvalOptions {
  CommonOptions common;
  std::string checkpoint, data, schema, split = "test";
};

struct Evaluated {
  eval::Predictions predictions;
  eval::EvalReport report;
  model::ModelConfig config;
};

Evaluated evaluate(const EvalOptions& o, std::uint64_t* fingerprint) {
  const auto ckpt = model::load_checkpoint(o.checkpoint);
  const auto prep = preparation_of(ckpt);
  const auto ds = load_dataset(o.data, o.schema, prep.repair, fingerprint);
  const auto& cfg = ckpt.model.config();
  check_compatible(cfg, ds);
  const auto part = select_split(ds, prep, cfg, o.split);
  Evaluated e{eval::predict(ckpt.model, part.dataset, part.starts, prep.scaler, prep.exo_mode), {}, cfg};
  e.report = eval::build_report(e.predictions, ds.rated_capacity, cfg);
  return e;
}

json eval_inputs(const EvalOptions& o) {
  return {{"checkpoint", file_input(o.checkpoint)}, {"data", file_input(o.data)}, {"schema", file_input(o.schema)}};
}

json eval_config(const EvalOptions& o) { return {{"split", o.split}}; }

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  std::uint64_t fp = 0;
  auto e = evaluate(o, &fp);
  Run run("eval", eval_config(o), eval_inputs(o), o.common.output_dir);
  run.set("dataset_fingerprint", util::hex64(fp));
  e.report.run_id = run.id();
  e.report.write(run.dir());
  for (const char* name : {"report.json", "per_horizon.csv", "decomposition.csv", "dm_acf.csv", "sample_losses.csv"}) {
    run.path(name);
  }
  util::write_file_atomic(run.path("forecasts.csv"), eval::forecast_csv(e.predictions));
  const auto& r = e.report;
  out << "samples " << r.samples << "\n";
  out << "model       mse " << fixed(r.model.mse) << " mae " << fixed(r.model.mae) << " rmse_mw "
      << fixed(r.model.rmse_mw) << "\n";
  out << "persistence mse " << fixed(r.persistence.mse) << " mae " << fixed(r.persistence.mae) << " rmse_mw "
      << fixed(r.persistence.rmse_mw) << "\n";
  if (r.dm.statistic) {
    out << "DM vs persistence " << fixed(*r.dm.statistic) << " p " << fixed(*r.dm.p_value) << "\n";
  } else {
    out << "DM vs persistence undefined\n";
  }
  run.finish(out);
  return kOk;
}

int cmd_interpret(const EvalOptions& o, std::ostream& out) {
  std::uint64_t fp = 0;
  const auto e = evaluate(o, &fp);
  Run run("interpret", eval_config(o), eval_inputs(o), o.common.output_dir);
  run.set("dataset_fingerprint", util::hex64(fp));
  const auto full = e.report.to_json();
  json summary = {{"run_id", run.id()}, {"samples", e.report.samples}, {"selection", full.at("selection")},
                  {"regimes", full.at("regimes")}};
  if (!e.predictions.hier_weights.empty()) {
    util::write_file_atomic(run.path("selection.csv"), eval::selection_csv(e.predictions, e.config));
  }
  if (!e.predictions.traces.empty()) {
    util::write_file_atomic(run.path("regimes.csv"), eval::regime_csv(e.predictions));
  }
  util::write_file_atomic(run.path("interpret.json"), summary.dump(2) + "\n");
  if (e.report.sparsity) {
    out << "active variables " << fixed(e.report.sparsity->active, 4) << "\n";
    for (std::size_t d = 0; d < e.report.variable_names.size(); ++d) {
      out << "  " << e.report.variable_names[d] << " " << fixed(e.report.mean_hier_weights[d], 4) << "\n";
    }
  } else {
    out << "no exogenous selection (target-only model)\n";
  }
  for (std::size_t k = 0; k < e.report.regimes.size(); ++k) {
    out << "regime " << k << " dominant " << fixed(e.report.regimes[k].dominant_percent, 4) << "%\n";
  }
  if (e.report.regime_separation) out << "regime separation " << fixed(*e.report.regime_separation, 4) << "\n";
  run.finish(out);
  return kOk;
}

// -------------------------------------------------------------- predict

struct PredictOptions {
  CommonOptions common;
  std::string checkpoint, window, schema;
};

int cmd_predict(const PredictOptions& o, std::ostream& out) {
  const auto ckpt = model::load_checkpoint(o.checkpoint);
  const auto prep = preparation_of(ckpt);
  const auto& cfg = ckpt.model.config();
  const auto ds = load_dataset(o.window, o.schema, prep.repair);
  check_compatible(cfg, ds);
  const std::size_t T = cfg.lookback, H = cfg.horizon;
  if (ds.length() < T) {
    throw data::DataError("window has " + std::to_string(ds.length()) + " usable rows, the model needs T=" +
                          std::to_string(T));
  }
  // The last T rows followed by H placeholder rows, so the regular batch
  // builder applies the exact training-time normalization.
  auto padded = ds.slice(ds.length() - T, ds.length());
  const auto step = std::chrono::minutes(padded.resolution_minutes);
  for (std::size_t h = 0; h < H; ++h) {
    padded.timestamps.push_back(padded.timestamps.back() + step);
    padded.target.push_back(padded.target.back());
    for (auto& col : padded.exogenous) col.push_back(col.back());
  }
  const auto starts = data::window_starts(padded, T, H);
  if (starts.empty() || starts.front() != 0) throw data::DataError("the last " + std::to_string(T) + " rows are not contiguous");
  const std::vector<std::size_t> first{0};
  const auto batch = data::make_batch(padded, first, T, H, prep.scaler, prep.exo_mode);
  const auto t = train::to_tensors(batch);
  const auto forecast = ckpt.model.forward(t.x_target, t.x_exogenous, nullptr).final;
  const auto mw = data::denormalize_forecast(forecast.data(), batch.stats[0]);

  Run run("predict", json::object(),
          {{"checkpoint", file_input(o.checkpoint)}, {"window", file_input(o.window)}, {"schema", file_input(o.schema)}},
          o.common.output_dir);
  std::ostringstream csv;
  csv << "step,timestamp,prediction_mw\n";
  for (std::size_t h = 0; h < H; ++h) {
    csv << h + 1 << ',' << data::format_timestamp(padded.timestamps[T + h]) << ',' << util::format_double(mw[h]) << '\n';
  }
  util::write_file_atomic(run.path("forecast.csv"), csv.str());
  out << "forecast of " << H << " steps from " << data::format_timestamp(padded.timestamps[T]) << "\n";
  run.finish(out);
  return kOk;
}

// -------------------------------------------------------------- compare

struct CompareOptions {
  CommonOptions common;
  std::string a, b, column = "model";
  std::optional<std::size_t> horizon;
};

fs::path losses_file(const fs::path& p) { return fs::is_directory(p) ? p / "sample_losses.csv" : p; }

std::optional<std::size_t> report_horizon(const fs::path& losses) {
  const auto report = losses.parent_path() / "report.json";
  if (!fs::exists(report)) return std::nullopt;
  return json::parse(util::read_file(report)).at("horizon").get<std::size_t>();
}

int cmd_compare(const CompareOptions& o, std::ostream& out) {
  const auto fa = losses_file(o.a);
  const auto fb = losses_file(o.b);
  auto h = o.horizon;
  if (!h) h = report_horizon(fa);
  if (!h) throw std::invalid_argument("--horizon is required when no report.json sits next to the losses");
  const auto la = eval::read_sample_losses(fa, o.column);
  const auto lb = eval::read_sample_losses(fb, o.column);
  if (la.size() != lb.size()) {
    throw data::DataError("sample count mismatch: " + std::to_string(la.size()) + " vs " + std::to_string(lb.size()));
  }
  const auto dm = eval::diebold_mariano(la, lb, *h);
  Run run("compare", {{"column", o.column}, {"horizon", *h}}, {{"a", file_input(fa)}, {"b", file_input(fb)}},
          o.common.output_dir);
  json result = {{"run_id", run.id()},
                 {"defined", dm.statistic.has_value()},
                 {"statistic", dm.statistic ? json(*dm.statistic) : json(nullptr)},
                 {"p_value", dm.p_value ? json(*dm.p_value) : json(nullptr)},
                 {"mean_differential", dm.mean_differential},
                 {"hac_variance", dm.hac_variance},
                 {"bandwidth", dm.bandwidth},
                 {"samples", dm.samples}};
  util::write_file_atomic(run.path("dm.json"), result.dump(2) + "\n");
  if (dm.statistic) {
    out << "DM statistic " << fixed(*dm.statistic) << " p " << fixed(*dm.p_value) << " (negative favours a)\n";
  } else {
    out << "DM undefined: the loss differential has no positive long-run variance\n";
  }
  run.finish(out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ECTO wind power forecasting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ECTO_VERSION);

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "write a synthetic wind farm dataset and its schema");
  add_common(c_synth, synth.common);
  c_synth->add_option("--length", synth.length, "number of rows");

  TrainOptions tr;
  auto* c_train = app.add_subcommand("train", "train a model and write a checkpoint");
  add_common(c_train, tr.common);
  c_train->add_option("--data", tr.data, "dataset CSV")->required()->check(CLI::ExistingFile);
  c_train->add_option("--schema", tr.schema, "schema JSON")->required()->check(CLI::ExistingFile);
  c_train->add_option("--ablate", tr.ablate, "ablation variant")->check(CLI::IsMember(model::ablation_names()));
  c_train->add_option("--horizon", tr.horizon, "forecast horizon H");
  c_train->add_option("--lookback", tr.lookback, "input window T");
  c_train->add_option("--d-model", tr.d_model, "model width");
  c_train->add_option("--epochs", tr.epochs, "maximum epochs");
  c_train->add_option("--patience", tr.patience, "early stopping patience");
  c_train->add_option("--max-steps", tr.max_steps, "cap on optimizer steps");
  c_train->add_option("--steps-per-epoch", tr.steps_per_epoch, "optimizer steps between validations");
  c_train->add_option("--batch-size", tr.batch_size, "training batch size");
  c_train->add_option("--lr", tr.lr, "peak learning rate");

  EvalOptions ev;
  auto* c_eval = app.add_subcommand("eval", "evaluate a checkpoint against persistence");
  EvalOptions in;
  auto* c_interp = app.add_subcommand("interpret", "export variable selection and regime traces");
  for (auto [cmd, opts] : {std::pair{c_eval, &ev}, std::pair{c_interp, &in}}) {
    cmd->add_option("--output-dir", opts->common.output_dir, "root for run directories");
    cmd->add_option("--checkpoint", opts->checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--data", opts->data, "dataset CSV")->required()->check(CLI::ExistingFile);
    cmd->add_option("--schema", opts->schema, "schema JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--split", opts->split, "train, val or test")->check(CLI::IsMember({"train", "val", "test"}));
  }

  PredictOptions pr;
  auto* c_predict = app.add_subcommand("predict", "forecast the H steps after a window CSV");
  c_predict->add_option("--output-dir", pr.common.output_dir, "root for run directories");
  c_predict->add_option("--checkpoint", pr.checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  c_predict->add_option("--window", pr.window, "CSV holding at least T rows")->required()->check(CLI::ExistingFile);
  c_predict->add_option("--schema", pr.schema, "schema JSON")->required()->check(CLI::ExistingFile);

  CompareOptions cmp;
  auto* c_compare = app.add_subcommand("compare", "Diebold-Mariano test between two sets of sample losses");
  c_compare->add_option("--output-dir", cmp.common.output_dir, "root for run directories");
  c_compare->add_option("a", cmp.a, "sample_losses.csv or eval run directory")->required()->check(CLI::ExistingPath);
  c_compare->add_option("b", cmp.b, "sample_losses.csv or eval run directory")->required()->check(CLI::ExistingPath);
  c_compare->add_option("--horizon", cmp.horizon, "forecast horizon (HAC bandwidth)");
  c_compare->add_option("--column", cmp.column, "loss column to compare");

  std::vector<std::string> argv_store{"ecto"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (c_synth->parsed()) return cmd_synth(synth, out);
    if (c_train->parsed()) return cmd_train(tr, out);
    if (c_eval->parsed()) return cmd_eval(ev, out);
    if (c_interp->parsed()) return cmd_interpret(in, out);
    if (c_predict->parsed()) return cmd_predict(pr, out);
    if (c_compare->parsed()) return cmd_compare(cmp, out);
  } catch (const ad::NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

int main(int argc, char** argv) {
  return run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

}  // namespace ecto::cli
