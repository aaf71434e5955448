#include "ecto/eval/report.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ecto/train/trainer.hpp"
#include "ecto/util/io.hpp"

namespace ecto::eval {

namespace {

using util::format_double;

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json metrics_json(const PointMetrics& m) {
  return {{"mse", m.mse}, {"mae", m.mae}, {"nse", opt(m.nse)}, {"rmse_mw", m.rmse_mw}, {"mbe_mw", m.mbe_mw}};
}

nlohmann::json cells_json(const std::vector<CellError>& cells) {
  auto out = nlohmann::json::array();
  for (const auto& c : cells) out.push_back({{"label", c.label}, {"count", c.count}, {"mse_mw2", opt(c.mse_mw2)}});
  return out;
}

std::string cell_value(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void append(std::vector<double>& dst, const ad::Tensor& t) { dst.insert(dst.end(), t.data().begin(), t.data().end()); }

void append_persistence(Predictions& p, const data::Batch& batch) {
  for (std::size_t i = 0; i < batch.size; ++i) {
    const double last_mw = batch.last_mw[i];
    const double last = (last_mw - batch.stats[i].mean) / batch.stats[i].std;
    for (std::size_t t = 0; t < batch.horizon; ++t) {
      p.persistence.push_back(last);
      p.persistence_mw.push_back(last_mw);
    }
  }
}

void append_batch_targets(Predictions& p, const data::SeriesDataset& ds, const data::Batch& batch,
                          std::size_t lookback) {
  p.target.insert(p.target.end(), batch.y.begin(), batch.y.end());
  p.target_mw.insert(p.target_mw.end(), batch.y_mw.begin(), batch.y_mw.end());
  for (auto s : batch.starts) {
    p.starts.push_back(s);
    p.timestamps.push_back(data::format_timestamp(ds.timestamps[s + lookback]));
  }
  append_persistence(p, batch);
}

}  // namespace

Predictions predict(const model::EctoModel& model, const data::SeriesDataset& dataset,
                    const std::vector<std::size_t>& starts, const data::ExoScaler& scaler,
                    data::ExoNormalization mode, std::size_t batch_size) {
  const auto& cfg = model.config();
  if (dataset.exogenous.size() != cfg.num_variables()) {
    throw ad::DimensionError("data has " + std::to_string(dataset.exogenous.size()) +
                             " exogenous variables, checkpoint expects " + std::to_string(cfg.num_variables()));
  }
  ad::NoGradGuard no_grad;
  Predictions p;
  p.horizon = cfg.horizon;
  for (std::size_t i = 0; i < starts.size(); i += batch_size) {
    const std::size_t n = std::min(batch_size, starts.size() - i);
    const auto batch = data::make_batch(dataset, std::span(starts).subspan(i, n), cfg.lookback, cfg.horizon, scaler, mode);
    const auto t = train::to_tensors(batch);
    const auto out = model.forward(t.x_target, t.x_exogenous, nullptr);
    append(p.prediction, out.final);
    for (std::size_t b = 0; b < n; ++b) {
      const auto row = std::span(out.final.data()).subspan(b * cfg.horizon, cfg.horizon);
      const auto mw = data::denormalize_forecast(row, batch.stats[b]);
      p.prediction_mw.insert(p.prediction_mw.end(), mw.begin(), mw.end());
      if (out.route.defined()) p.traces.push_back(out.trace(b));
    }
    if (out.hier_weights.defined()) {
      append(p.group_weights, out.group_weights);
      append(p.variable_weights, out.variable_weights);
      append(p.hier_weights, out.hier_weights);
    }
    append_batch_targets(p, dataset, batch, cfg.lookback);
  }
  return p;
}

Predictions predict_persistence(const data::SeriesDataset& dataset, const std::vector<std::size_t>& starts,
                                std::size_t lookback, std::size_t horizon) {
  Predictions p;
  p.horizon = horizon;
  const auto scaler = data::ExoScaler::identity(dataset.exogenous.size());
  for (std::size_t i = 0; i < starts.size(); i += 256) {
    const std::size_t n = std::min<std::size_t>(256, starts.size() - i);
    const auto batch = data::make_batch(dataset, std::span(starts).subspan(i, n), lookback, horizon, scaler);
    append_batch_targets(p, dataset, batch, lookback);
  }
  p.prediction = p.persistence;
  p.prediction_mw = p.persistence_mw;
  return p;
}

EvalReport build_report(const Predictions& p, double rated_mw, const model::ModelConfig& config) {
  EvalReport r;
  r.samples = p.samples();
  r.horizon = p.horizon;
  if (r.samples == 0) throw std::invalid_argument("evaluation needs at least one window");
  r.model = point_metrics(p.prediction, p.target, p.prediction_mw, p.target_mw);
  r.persistence = point_metrics(p.persistence, p.target, p.persistence_mw, p.target_mw);
  r.per_horizon_mse = per_horizon_mse(p.prediction, p.target, p.horizon);
  r.persistence_per_horizon_mse = per_horizon_mse(p.persistence, p.target, p.horizon);
  r.decomposition = decompose_errors(p.prediction_mw, p.target_mw, p.horizon, rated_mw);
  r.model_losses = sample_losses(p.prediction, p.target, p.horizon);
  r.persistence_losses = sample_losses(p.persistence, p.target, p.horizon);
  r.dm = diebold_mariano(r.model_losses, r.persistence_losses, p.horizon);
  r.variable_names = config.variable_names;
  r.group_names = config.group_names;

  const std::size_t D = config.num_variables();
  if (!p.hier_weights.empty()) {
    model::SparsityStats mean;
    r.mean_hier_weights.assign(D, 0.0);
    for (std::size_t b = 0; b < r.samples; ++b) {
      const auto row = std::span(p.hier_weights).subspan(b * D, D);
      const auto s = model::sparsity_stats(row);
      mean.active += s.active;
      mean.perplexity += s.perplexity;
      mean.normalized_entropy += s.normalized_entropy;
      for (std::size_t d = 0; d < D; ++d) r.mean_hier_weights[d] += row[d];
    }
    const double n = static_cast<double>(r.samples);
    mean.active /= n;
    mean.perplexity /= n;
    mean.normalized_entropy /= n;
    for (auto& w : r.mean_hier_weights) w /= n;
    r.sparsity = mean;
    const std::size_t G = p.group_weights.size() / r.samples;
    r.mean_group_weights.assign(G, 0.0);
    for (std::size_t i = 0; i < p.group_weights.size(); ++i) r.mean_group_weights[i % G] += p.group_weights[i] / n;
  }
  if (!p.traces.empty()) {
    r.regimes = model::regime_statistics(p.traces);
    const double sep = model::regime_separation(p.traces);
    if (!std::isnan(sep)) r.regime_separation = sep;
  }
  return r;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  if (!run_id.empty()) j["run_id"] = run_id;
  j["samples"] = samples;
  j["horizon"] = horizon;
  j["metric_spaces"] = {{"mse", "normalized"}, {"mae", "normalized"}, {"nse", "normalized"},
                        {"rmse_mw", "MW"}, {"mbe_mw", "MW"}};
  j["rows"] = {{{"name", "model"}, {"metrics", metrics_json(model)}},
               {{"name", "persistence"}, {"metrics", metrics_json(persistence)}}};
  j["per_horizon_mse"] = per_horizon_mse;
  j["persistence_per_horizon_mse"] = persistence_per_horizon_mse;
  j["decomposition"] = {{"power_bins", cells_json(decomposition.power_bins)},
                        {"ramp_classes", cells_json(decomposition.ramp_classes)},
                        {"per_horizon_mse_mw2", decomposition.per_horizon_mse_mw2},
                        {"overall_mse_mw2", decomposition.overall_mse_mw2}};
  j["diebold_mariano"] = {{"reference", "persistence"},
                          {"statistic", opt(dm.statistic)},
                          {"p_value", opt(dm.p_value)},
                          {"defined", dm.statistic.has_value()},
                          {"mean_differential", dm.mean_differential},
                          {"hac_variance", dm.hac_variance},
                          {"bandwidth", dm.bandwidth},
                          {"samples", dm.samples}};
  if (sparsity) {
    j["selection"] = {{"active_variables", sparsity->active},
                      {"perplexity", sparsity->perplexity},
                      {"normalized_entropy", sparsity->normalized_entropy},
                      {"variables", variable_names},
                      {"mean_hier_weights", mean_hier_weights},
                      {"groups", group_names},
                      {"mean_group_weights", mean_group_weights}};
  } else {
    j["selection"] = nullptr;
  }
  if (!regimes.empty()) {
    auto rows = nlohmann::json::array();
    for (std::size_t k = 0; k < regimes.size(); ++k) {
      const auto& s = regimes[k];
      rows.push_back({{"regime", k},
                      {"dominant_percent", s.dominant_percent},
                      {"mean_weight", s.mean_weight},
                      {"mean_gain", s.count ? nlohmann::json(s.mean_gain) : nlohmann::json(nullptr)},
                      {"mean_bias", s.count ? nlohmann::json(s.mean_bias) : nlohmann::json(nullptr)},
                      {"count", s.count}});
    }
    j["regimes"] = {{"table", rows}, {"separation", opt(regime_separation)}};
  } else {
    j["regimes"] = nullptr;
  }
  return j;
}

void EvalReport::write(const std::filesystem::path& dir) const {
  util::write_file_atomic(dir / "report.json", to_json().dump(2) + "\n");

  std::ostringstream ph;
  ph << "step,model_mse,persistence_mse,model_mse_mw2\n";
  for (std::size_t t = 0; t < horizon; ++t) {
    ph << t + 1 << ',' << format_double(per_horizon_mse[t]) << ',' << format_double(persistence_per_horizon_mse[t])
       << ',' << format_double(decomposition.per_horizon_mse_mw2[t]) << '\n';
  }
  util::write_file_atomic(dir / "per_horizon.csv", ph.str());

  std::ostringstream dc;
  dc << "table,cell,count,mse_mw2\n";
  for (const auto& c : decomposition.power_bins) dc << "power," << c.label << ',' << c.count << ',' << cell_value(c.mse_mw2) << '\n';
  for (const auto& c : decomposition.ramp_classes) dc << "ramp," << c.label << ',' << c.count << ',' << cell_value(c.mse_mw2) << '\n';
  util::write_file_atomic(dir / "decomposition.csv", dc.str());

  std::ostringstream acf;
  acf << "lag,acf\n";
  for (std::size_t j = 0; j < dm.acf.size(); ++j) acf << j << ',' << format_double(dm.acf[j]) << '\n';
  util::write_file_atomic(dir / "dm_acf.csv", acf.str());

  std::ostringstream losses;
  losses << "sample,model,persistence\n";
  for (std::size_t i = 0; i < model_losses.size(); ++i)
    losses << i << ',' << format_double(model_losses[i]) << ',' << format_double(persistence_losses[i]) << '\n';
  util::write_file_atomic(dir / "sample_losses.csv", losses.str());
}

std::string regime_csv(const Predictions& p) {
  std::ostringstream out;
  const std::size_t K = p.traces.empty() ? 0 : p.traces.front().route.size();
  out << "sample,timestamp";
  for (std::size_t k = 0; k < K; ++k) out << ",r" << k;
  out << ",dominant,mean_gain,mean_bias\n";
  for (std::size_t i = 0; i < p.traces.size(); ++i) {
    const auto& t = p.traces[i];
    out << i << ',' << p.timestamps[i];
    for (double r : t.route) out << ',' << format_double(r);
    out << ',' << t.dominant << ',' << format_double(t.mean_gain) << ',' << format_double(t.mean_bias) << '\n';
  }
  return out.str();
}

std::string selection_csv(const Predictions& p, const model::ModelConfig& config) {
  std::ostringstream out;
  out << "sample,timestamp,variable,group,group_weight,variable_weight,hier_weight\n";
  const std::size_t D = config.num_variables();
  const std::size_t B = p.samples();
  if (p.hier_weights.size() != B * D) return out.str();
  const std::size_t G = p.group_weights.size() / B;
  std::vector<std::size_t> group_of(D, 0);
  for (std::size_t g = 0; g < config.groups.size(); ++g)
    for (auto m : config.groups[g]) group_of[m] = g;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t d = 0; d < D; ++d) {
      const std::size_t g = group_of[d];
      out << b << ',' << p.timestamps[b] << ',' << config.variable_names[d] << ',' << config.group_names[g] << ','
          << format_double(p.group_weights[b * G + g]) << ',' << format_double(p.variable_weights[b * D + d]) << ','
          << format_double(p.hier_weights[b * D + d]) << '\n';
    }
  }
  return out.str();
}

std::string forecast_csv(const Predictions& p) {
  std::ostringstream out;
  out << "sample,timestamp,step,prediction_mw,target_mw\n";
  for (std::size_t b = 0; b < p.samples(); ++b) {
    for (std::size_t t = 0; t < p.horizon; ++t) {
      const std::size_t i = b * p.horizon + t;
      out << b << ',' << p.timestamps[b] << ',' << t + 1 << ',' << format_double(p.prediction_mw[i]) << ','
          << (i < p.target_mw.size() ? format_double(p.target_mw[i]) : "") << '\n';
    }
  }
  return out.str();
}

std::vector<double> read_sample_losses(const std::filesystem::path& csv, const std::string& column) {
  std::istringstream in(util::read_file(csv));
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(csv.string() + ": empty loss file");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw std::runtime_error(csv.string() + ": no column '" + column + "'");
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream r(line);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) {
      if (!std::getline(r, cell, ',')) throw std::runtime_error(csv.string() + ": row " + std::to_string(row) + " is short");
    }
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::runtime_error(csv.string() + ": row " + std::to_string(row) + " has a non-numeric loss");
    }
  }
  return out;
}

}  // namespace ecto::eval
