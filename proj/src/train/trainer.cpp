#include "ecto/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecto/autodiff/init.hpp"
#include "ecto/autodiff/optim.hpp"
#include "ecto/eval/metrics.hpp"
#include "ecto/util/io.hpp"

namespace ecto::train {

nlohmann::json TrainConfig::to_json() const {
  return {{"batch_size", batch_size},   {"peak_lr", peak_lr},   {"pct_start", pct_start},
          {"max_epochs", max_epochs},   {"patience", patience}, {"lambda", lambda},
          {"seed", seed},               {"steps_per_epoch", steps_per_epoch},
          {"max_steps", max_steps},     {"eval_batch_size", eval_batch_size}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& doc) {
  TrainConfig c;
  const auto known = c.to_json();
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown training option '" + key + "'");
  }
  try {
    c.batch_size = doc.value("batch_size", c.batch_size);
    c.peak_lr = doc.value("peak_lr", c.peak_lr);
    c.pct_start = doc.value("pct_start", c.pct_start);
    c.max_epochs = doc.value("max_epochs", c.max_epochs);
    c.patience = doc.value("patience", c.patience);
    c.lambda = doc.value("lambda", c.lambda);
    c.seed = doc.value("seed", c.seed);
    c.steps_per_epoch = doc.value("steps_per_epoch", c.steps_per_epoch);
    c.max_steps = doc.value("max_steps", c.max_steps);
    c.eval_batch_size = doc.value("eval_batch_size", c.eval_batch_size);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed training option: ") + e.what());
  }
  if (c.batch_size == 0 || c.eval_batch_size == 0) throw std::invalid_argument("batch sizes must be positive");
  if (c.max_epochs == 0) throw std::invalid_argument("max_epochs must be positive");
  if (!(c.peak_lr > 0.0)) throw std::invalid_argument("peak_lr must be positive");
  if (!(c.pct_start > 0.0 && c.pct_start < 1.0)) throw std::invalid_argument("pct_start must lie in (0, 1)");
  if (c.lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
  return c;
}

WindowedData prepare_windows(const data::SeriesDataset& dataset, std::size_t lookback, std::size_t horizon,
                             const data::SplitFractions& fractions, data::ExoNormalization exo_mode) {
  auto splits = data::chronological_split(dataset, fractions, lookback + horizon);
  WindowedData w;
  w.lookback = lookback;
  w.horizon = horizon;
  w.exo_mode = exo_mode;
  w.train_starts = data::window_starts(splits.train, lookback, horizon);
  w.val_starts = data::window_starts(splits.val, lookback, horizon);
  w.test_starts = data::window_starts(splits.test, lookback, horizon);
  auto require = [](const std::vector<std::size_t>& starts, const char* name) {
    if (starts.empty()) throw data::DataError(std::string(name) + " split has no contiguous window");
  };
  require(w.train_starts, "training");
  require(w.val_starts, "validation");
  require(w.test_starts, "test");
  w.scaler = exo_mode == data::ExoNormalization::Global ? data::ExoScaler::fit(splits.train)
                                                        : data::ExoScaler::identity(dataset.exogenous.size());
  w.train = std::move(splits.train);
  w.val = std::move(splits.val);
  w.test = std::move(splits.test);
  return w;
}

BatchTensors to_tensors(const data::Batch& b) {
  return {ad::Tensor::from({b.size, b.lookback}, b.x_target),
          ad::Tensor::from({b.size, b.lookback, b.channels}, b.x_exogenous),
          ad::Tensor::from({b.size, b.horizon}, b.y)};
}

bool EarlyStopping::update(std::size_t epoch, double loss) {
  improved_ = loss < best_;
  if (improved_) {
    best_ = loss;
    best_epoch_ = epoch;
    streak_ = 0;
  } else {
    ++streak_;
  }
  return streak_ > patience_;
}

double evaluate_loss(const model::EctoModel& model, const data::SeriesDataset& dataset,
                     const std::vector<std::size_t>& starts, const data::ExoScaler& scaler,
                     data::ExoNormalization mode, double lambda, std::size_t batch_size) {
  ad::NoGradGuard no_grad;
  const auto& cfg = model.config();
  double se = 0.0, ae = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < starts.size(); i += batch_size) {
    const std::size_t n = std::min(batch_size, starts.size() - i);
    const auto batch = data::make_batch(dataset, std::span(starts).subspan(i, n), cfg.lookback, cfg.horizon, scaler, mode);
    const auto t = to_tensors(batch);
    const auto pred = model.forward(t.x_target, t.x_exogenous, nullptr).final;
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double e = pred.data()[j] - batch.y[j];
      se += e * e;
      ae += std::abs(e);
    }
    count += pred.size();
  }
  if (count == 0) throw data::DataError("no windows to evaluate");
  return se / static_cast<double>(count) + lambda * ae / static_cast<double>(count);
}

namespace {

using Snapshot = std::vector<std::vector<double>>;

Snapshot snapshot(const ad::ParameterMap& params) {
  Snapshot s;
  for (const auto& [name, t] : params) s.emplace_back(t.data().begin(), t.data().end());
  return s;
}

void restore(ad::ParameterMap& params, const Snapshot& s) {
  std::size_t i = 0;
  for (auto& [name, t] : params) std::copy(s[i].begin(), s[i].end(), t.mutable_data().begin()), ++i;
}

}  // namespace

TrainResult train(model::EctoModel& model, const WindowedData& data, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  const auto& mcfg = model.config();
  if (mcfg.lookback != data.lookback || mcfg.horizon != data.horizon) {
    throw ad::DimensionError("model expects T=" + std::to_string(mcfg.lookback) + ", H=" + std::to_string(mcfg.horizon) +
                             " but windows were built for T=" + std::to_string(data.lookback) +
                             ", H=" + std::to_string(data.horizon));
  }
  auto params = model.parameters();
  const std::size_t n = data.train_starts.size();
  const std::size_t batch = std::min(config.batch_size, n);
  const std::size_t per_epoch = config.steps_per_epoch > 0 ? config.steps_per_epoch : (n + batch - 1) / batch;
  std::size_t total = per_epoch * config.max_epochs;
  if (config.max_steps > 0) total = std::min(total, config.max_steps);

  auto state = ad::make_optimizer_state(params, {config.peak_lr, config.pct_start, 25.0, 1e4, total});
  auto shuffle_rng = ad::derive_stream(config.seed, "train/shuffle");
  auto dropout_rng = ad::derive_stream(config.seed, "train/dropout");
  std::vector<std::size_t> order = data.train_starts;
  std::size_t cursor = order.size();

  auto validate = [&] {
    try {
      return evaluate_loss(model, data.val, data.val_starts, data.scaler, data.exo_mode, config.lambda,
                           config.eval_batch_size);
    } catch (const ad::NumericError& e) {
      throw TrainingDiverged(std::string("validation produced a non-finite value: ") + e.what());
    }
  };

  TrainResult result;
  result.initial_val_loss = validate();
  EarlyStopping stopper(config.patience);
  Snapshot best = snapshot(params);
  std::vector<std::size_t> starts(batch);

  for (std::size_t epoch = 1; epoch <= config.max_epochs && result.steps < total; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    std::size_t epoch_steps = 0;
    for (; epoch_steps < per_epoch && result.steps < total; ++epoch_steps) {
      for (auto& s : starts) {
        if (cursor == order.size()) {
          std::shuffle(order.begin(), order.end(), shuffle_rng);
          cursor = 0;
        }
        s = order[cursor++];
      }
      const auto b = data::make_batch(data.train, starts, mcfg.lookback, mcfg.horizon, data.scaler, data.exo_mode);
      const auto t = to_tensors(b);
      const double lr = ad::onecycle_lr(result.steps, total, config.peak_lr, config.pct_start);
      try {
        const auto loss = eval::composite_loss(model.forward(t.x_target, t.x_exogenous, &dropout_rng).final, t.y,
                                               config.lambda);
        for (auto& [name, p] : params) p.zero_grad();
        loss.backward();
        loss_sum += loss.item();
      } catch (const ad::NumericError& e) {
        throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) + ", step " +
                               std::to_string(result.steps + 1) + ": " + e.what());
      }
      ad::adam_step(params, state, lr);
      ++result.steps;
      rec.lr = lr;
    }
    rec.steps = result.steps;
    rec.train_loss = epoch_steps > 0 ? loss_sum / static_cast<double>(epoch_steps) : 0.0;
    rec.val_loss = validate();
    if (!std::isfinite(rec.val_loss)) {
      throw TrainingDiverged("validation loss is not finite after epoch " + std::to_string(epoch));
    }
    const bool stop = stopper.update(epoch, rec.val_loss);
    rec.improved = stopper.improved();
    if (rec.improved) best = snapshot(params);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (stop) {
      result.stopped_early = true;
      break;
    }
  }
  restore(params, best);
  result.best_epoch = stopper.best_epoch();
  result.best_val_loss = result.history.empty() ? result.initial_val_loss : stopper.best_loss();
  return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out << "epoch,steps,train_loss,val_loss,lr,improved\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << r.steps << ',' << util::format_double(r.train_loss) << ','
        << util::format_double(r.val_loss) << ',' << util::format_double(r.lr) << ',' << (r.improved ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace ecto::train
