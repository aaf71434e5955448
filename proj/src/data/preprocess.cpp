#include "ecto/data/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace ecto::data {

RepairReport repair_series(std::vector<double>& s, const RepairConfig& config) {
  RepairReport report;
  const std::size_t n = s.size();

  // Internal gaps short enough to interpolate.
  std::size_t i = 0;
  while (i < n) {
    if (!std::isnan(s[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < n && std::isnan(s[i])) ++i;
    const std::size_t len = i - begin;
    if (begin == 0 || i == n || len > config.max_interpolation_gap) continue;
    const double left = s[begin - 1];
    const double right = s[i];
    for (std::size_t k = 0; k < len; ++k) {
      const double frac = static_cast<double>(k + 1) / static_cast<double>(len + 1);
      s[begin + k] = left + (right - left) * frac;
    }
    report.interpolated += len;
  }

  if (config.fill_limit == 0) return report;
  std::vector<double> before = s;
  // Forward fill from the last observation preceding each remaining gap.
  for (i = 0; i < n;) {
    if (!std::isnan(before[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < n && std::isnan(before[i])) ++i;
    if (begin == 0) continue;
    const std::size_t fill = std::min(config.fill_limit, i - begin);
    for (std::size_t k = 0; k < fill; ++k) s[begin + k] = before[begin - 1];
    report.forward_filled += fill;
  }
  // Backward fill from the next observation, over what forward fill left.
  for (i = 0; i < n;) {
    if (!std::isnan(s[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < n && std::isnan(s[i])) ++i;
    if (i == n) continue;
    const std::size_t fill = std::min(config.fill_limit, i - begin);
    for (std::size_t k = 0; k < fill; ++k) s[i - 1 - k] = s[i];
    report.backward_filled += fill;
  }
  return report;
}

RepairReport repair_gaps(SeriesDataset& dataset, const RepairConfig& config) {
  RepairReport total;
  auto repair_column = [&](std::vector<double>& col, const std::string& name) {
    if (!col.empty() && std::all_of(col.begin(), col.end(), [](double v) { return std::isnan(v); })) {
      throw DataError("column '" + name + "' is entirely missing");
    }
    const auto r = repair_series(col, config);
    total.interpolated += r.interpolated;
    total.forward_filled += r.forward_filled;
    total.backward_filled += r.backward_filled;
  };
  repair_column(dataset.target, dataset.target_name);
  for (std::size_t d = 0; d < dataset.num_exogenous(); ++d) repair_column(dataset.exogenous[d], dataset.exogenous_names[d]);

  const std::size_t n = dataset.length();
  std::vector<bool> keep(n, true);
  for (std::size_t r = 0; r < n; ++r) {
    bool missing = std::isnan(dataset.target[r]);
    for (const auto& col : dataset.exogenous) missing = missing || std::isnan(col[r]);
    keep[r] = !missing;
  }
  auto compact = [&](auto& vec) {
    std::size_t w = 0;
    for (std::size_t r = 0; r < n; ++r)
      if (keep[r]) vec[w++] = vec[r];
    vec.resize(w);
  };
  compact(dataset.timestamps);
  compact(dataset.target);
  for (auto& col : dataset.exogenous) compact(col);
  total.rows_dropped = n - dataset.length();
  if (dataset.length() == 0) throw DataError("no complete rows remain after gap repair");
  return total;
}

DatasetSplits chronological_split(const SeriesDataset& dataset, const SplitFractions& f, std::size_t min_length) {
  if (f.train <= 0.0 || f.val < 0.0 || f.test <= 0.0 || std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw DataError("split fractions must be positive and sum to 1");
  }
  const std::size_t n = dataset.length();
  const auto boundary = [n](double frac) {
    return std::min(n, static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9)));
  };
  const std::size_t train_end = boundary(f.train);
  const std::size_t val_end = boundary(f.train + f.val);
  DatasetSplits out{dataset.slice(0, train_end), dataset.slice(train_end, val_end), dataset.slice(val_end, n)};
  const std::pair<const char*, std::size_t> lengths[] = {
      {"train", out.train.length()}, {"validation", out.val.length()}, {"test", out.test.length()}};
  for (const auto& [name, len] : lengths) {
    if (len < min_length) {
      throw DataError(std::string(name) + " split has " + std::to_string(len) + " rows but a window needs " +
                      std::to_string(min_length));
    }
  }
  return out;
}

std::vector<std::size_t> window_starts(const SeriesDataset& dataset, std::size_t lookback, std::size_t horizon) {
  const std::size_t span = lookback + horizon;
  const std::size_t n = dataset.length();
  std::vector<std::size_t> starts;
  if (span == 0 || n < span) return starts;
  const std::chrono::seconds step{static_cast<long long>(dataset.resolution_minutes) * 60};
  // run_end[i]: one past the last row of the contiguous run containing i.
  std::vector<std::size_t> run_end(n);
  run_end[n - 1] = n;
  for (std::size_t i = n - 1; i-- > 0;) {
    run_end[i] = (dataset.timestamps[i + 1] - dataset.timestamps[i] == step) ? run_end[i + 1] : i + 1;
  }
  for (std::size_t s = 0; s + span <= n; ++s)
    if (run_end[s] >= s + span) starts.push_back(s);
  return starts;
}

NormStats window_stats(std::span<const double> w) {
  NormStats st;
  if (w.empty()) return st;
  double sum = 0.0;
  for (double v : w) sum += v;
  st.mean = sum / static_cast<double>(w.size());
  double ss = 0.0;
  for (double v : w) ss += (v - st.mean) * (v - st.mean);
  st.std = std::sqrt(ss / static_cast<double>(w.size()));
  if (st.std < kStdFloor) {
    st.std = kStdFloor;
    st.floored = true;
  }
  return st;
}

std::vector<double> normalize_window(std::span<const double> w, const NormStats& st) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = (w[i] - st.mean) / st.std;
  return out;
}

std::vector<double> denormalize_forecast(std::span<const double> f, const NormStats& st) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] * st.std + st.mean;
  return out;
}

ExoScaler ExoScaler::fit(const SeriesDataset& train) {
  ExoScaler sc;
  for (const auto& col : train.exogenous) {
    const auto st = window_stats(col);
    sc.mean.push_back(st.mean);
    sc.std.push_back(st.std);
  }
  return sc;
}

ExoScaler ExoScaler::identity(std::size_t channels) {
  return {std::vector<double>(channels, 0.0), std::vector<double>(channels, 1.0)};
}

Batch make_batch(const SeriesDataset& ds, std::span<const std::size_t> starts, std::size_t T, std::size_t H,
                 const ExoScaler& scaler, ExoNormalization mode) {
  const std::size_t D = ds.num_exogenous();
  if (mode == ExoNormalization::Global && (scaler.mean.size() != D || scaler.std.size() != D)) {
    throw DataError("exogenous scaler has " + std::to_string(scaler.mean.size()) + " channels, data has " +
                    std::to_string(D));
  }
  Batch b;
  b.size = starts.size();
  b.lookback = T;
  b.horizon = H;
  b.channels = D;
  b.starts.assign(starts.begin(), starts.end());
  b.x_target.resize(b.size * T);
  b.x_exogenous.resize(b.size * T * D);
  b.y.resize(b.size * H);
  b.y_mw.resize(b.size * H);
  b.last_mw.resize(b.size);
  b.stats.resize(b.size);
  for (std::size_t i = 0; i < b.size; ++i) {
    const std::size_t s = starts[i];
    if (s + T + H > ds.length()) throw DataError("window start " + std::to_string(s) + " runs past the data");
    std::span<const double> window(ds.target.data() + s, T);
    const auto st = window_stats(window);
    b.stats[i] = st;
    if (st.floored) ++b.floored_windows;
    for (std::size_t t = 0; t < T; ++t) b.x_target[i * T + t] = (window[t] - st.mean) / st.std;
    for (std::size_t h = 0; h < H; ++h) {
      const double v = ds.target[s + T + h];
      b.y_mw[i * H + h] = v;
      b.y[i * H + h] = (v - st.mean) / st.std;
    }
    b.last_mw[i] = window[T - 1];
    for (std::size_t d = 0; d < D; ++d) {
      double mu = 0.0;
      double sd = 1.0;
      if (mode == ExoNormalization::Global) {
        mu = scaler.mean[d];
        sd = scaler.std[d];
      } else {
        const auto wst = window_stats(std::span<const double>(ds.exogenous[d].data() + s, T));
        mu = wst.mean;
        sd = wst.std;
      }
      for (std::size_t t = 0; t < T; ++t) b.x_exogenous[(i * T + t) * D + d] = (ds.exogenous[d][s + t] - mu) / sd;
    }
  }
  return b;
}

}  // namespace ecto::data
