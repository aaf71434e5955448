#include "ecto/eval/metrics.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ecto/autodiff/ops.hpp"

namespace ecto::eval {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw ad::DimensionError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " + std::to_string(b));
}

void require_rows(std::size_t n, std::size_t horizon, const char* what) {
  if (horizon == 0 || n % horizon != 0)
    throw ad::DimensionError(std::string(what) + ": " + std::to_string(n) + " values do not form rows of " +
                             std::to_string(horizon));
}

}  // namespace

ad::Tensor composite_loss(const ad::Tensor& prediction, const ad::Tensor& target, double lambda) {
  if (prediction.shape() != target.shape())
    throw ad::DimensionError("loss: prediction " + ad::shape_str(prediction.shape()) + " vs target " +
                             ad::shape_str(target.shape()));
  const auto diff = ad::sub(prediction, target);
  const auto mse = ad::mean(ad::square(diff));
  if (lambda == 0.0) return mse;
  return ad::add(mse, ad::scale(ad::mean(ad::abs(diff)), lambda));
}

std::optional<double> nse(std::span<const double> prediction, std::span<const double> target) {
  require_same(prediction.size(), target.size(), "nse");
  if (target.empty()) return std::nullopt;
  const double mean = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(target.size());
  double residual = 0.0, total = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    residual += (prediction[i] - target[i]) * (prediction[i] - target[i]);
    total += (target[i] - mean) * (target[i] - mean);
  }
  if (total == 0.0) return std::nullopt;
  return 1.0 - residual / total;
}

PointMetrics point_metrics(std::span<const double> prediction, std::span<const double> target,
                           std::span<const double> prediction_mw, std::span<const double> target_mw) {
  require_same(prediction.size(), target.size(), "metrics");
  require_same(prediction_mw.size(), target_mw.size(), "metrics (MW)");
  PointMetrics m;
  if (target.empty()) return m;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = prediction[i] - target[i];
    m.mse += e * e;
    m.mae += std::abs(e);
  }
  m.mse /= static_cast<double>(target.size());
  m.mae /= static_cast<double>(target.size());
  m.nse = nse(prediction, target);
  double se = 0.0, bias = 0.0;
  for (std::size_t i = 0; i < target_mw.size(); ++i) {
    const double e = prediction_mw[i] - target_mw[i];
    se += e * e;
    bias += e;
  }
  if (!target_mw.empty()) {
    m.rmse_mw = std::sqrt(se / static_cast<double>(target_mw.size()));
    m.mbe_mw = bias / static_cast<double>(target_mw.size());
  }
  return m;
}

std::vector<double> per_horizon_mse(std::span<const double> prediction, std::span<const double> target,
                                    std::size_t horizon) {
  require_same(prediction.size(), target.size(), "per_horizon_mse");
  require_rows(target.size(), horizon, "per_horizon_mse");
  std::vector<double> out(horizon, 0.0);
  const std::size_t rows = target.size() / horizon;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = prediction[i] - target[i];
    out[i % horizon] += e * e;
  }
  for (auto& v : out) v /= static_cast<double>(rows);
  return out;
}

std::vector<double> persistence_forecast(std::span<const double> window, std::size_t horizon) {
  if (window.empty()) throw std::invalid_argument("persistence: empty window");
  return std::vector<double>(horizon, window.back());
}

ErrorDecomposition decompose_errors(std::span<const double> prediction_mw, std::span<const double> target_mw,
                                    std::size_t horizon, double rated_mw) {
  require_same(prediction_mw.size(), target_mw.size(), "decompose_errors");
  require_rows(target_mw.size(), horizon, "decompose_errors");
  if (!(rated_mw > 0.0)) throw std::invalid_argument("decompose_errors: rated capacity must be positive");

  static constexpr std::array<double, 6> edges{0.0, 5.0, 20.0, 50.0, 80.0, 100.0};
  ErrorDecomposition out;
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    out.power_bins.push_back({std::to_string(static_cast<int>(edges[b])) + "-" +
                                  std::to_string(static_cast<int>(edges[b + 1])) + "%",
                              0, std::nullopt});
  }
  out.ramp_classes = {{"Ramp Up", 0, std::nullopt}, {"Ramp Down", 0, std::nullopt}, {"Stable", 0, std::nullopt}};
  std::vector<double> bin_se(out.power_bins.size(), 0.0), ramp_se(3, 0.0);
  out.per_horizon_mse_mw2.assign(horizon, 0.0);

  const std::size_t rows = target_mw.size() / horizon;
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* y = target_mw.data() + r * horizon;
    const double* p = prediction_mw.data() + r * horizon;
    double se = 0.0, mean = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      const double e = p[t] - y[t];
      se += e * e;
      mean += y[t];
      out.per_horizon_mse_mw2[t] += e * e;
    }
    mean /= static_cast<double>(horizon);
    total += se;

    const double pct = 100.0 * mean / rated_mw;
    std::size_t bin = 0;
    while (bin + 1 < out.power_bins.size() && pct >= edges[bin + 1]) ++bin;
    out.power_bins[bin].count += 1;
    bin_se[bin] += se;

    const double change = y[horizon - 1] - y[0];
    const std::size_t ramp = change >= kRampThresholdMw ? 0 : (change <= -kRampThresholdMw ? 1 : 2);
    out.ramp_classes[ramp].count += 1;
    ramp_se[ramp] += se;
  }
  const double h = static_cast<double>(horizon);
  for (std::size_t b = 0; b < out.power_bins.size(); ++b)
    if (out.power_bins[b].count > 0) out.power_bins[b].mse_mw2 = bin_se[b] / (h * static_cast<double>(out.power_bins[b].count));
  for (std::size_t c = 0; c < 3; ++c)
    if (out.ramp_classes[c].count > 0) out.ramp_classes[c].mse_mw2 = ramp_se[c] / (h * static_cast<double>(out.ramp_classes[c].count));
  if (rows > 0) {
    for (auto& v : out.per_horizon_mse_mw2) v /= static_cast<double>(rows);
    out.overall_mse_mw2 = total / static_cast<double>(target_mw.size());
  }
  return out;
}

double bartlett_weight(std::size_t lag, std::size_t bandwidth) {
  if (lag >= bandwidth) return 0.0;
  return 1.0 - static_cast<double>(lag) / static_cast<double>(bandwidth);
}

double autocovariance(std::span<const double> series, std::size_t lag) {
  const std::size_t n = series.size();
  if (n == 0 || lag >= n) return 0.0;
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double s = 0.0;
  for (std::size_t t = lag; t < n; ++t) s += (series[t] - mean) * (series[t - lag] - mean);
  return s / static_cast<double>(n);
}

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
  std::vector<double> out(max_lag + 1, 0.0);
  const double g0 = autocovariance(series, 0);
  if (g0 <= 0.0) return out;
  for (std::size_t j = 0; j <= max_lag; ++j) out[j] = autocovariance(series, j) / g0;
  return out;
}

double newey_west_variance(std::span<const double> series, std::size_t bandwidth) {
  double v = autocovariance(series, 0);
  for (std::size_t j = 1; j < bandwidth; ++j) v += 2.0 * bartlett_weight(j, bandwidth) * autocovariance(series, j);
  return v;
}

DmResult diebold_mariano(std::span<const double> loss_a, std::span<const double> loss_b, std::size_t bandwidth) {
  require_same(loss_a.size(), loss_b.size(), "diebold_mariano");
  if (bandwidth == 0) throw std::invalid_argument("diebold_mariano: bandwidth must be >= 1");
  DmResult r;
  r.samples = loss_a.size();
  r.bandwidth = bandwidth;
  if (r.samples < 2) return r;
  std::vector<double> d(r.samples);
  for (std::size_t t = 0; t < r.samples; ++t) d[t] = loss_a[t] - loss_b[t];
  r.mean_differential = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(r.samples);
  r.hac_variance = newey_west_variance(d, bandwidth);
  r.acf = autocorrelation(d, 4 * bandwidth);
  if (!(r.hac_variance > 0.0)) return r;
  const double stat = r.mean_differential / std::sqrt(r.hac_variance / static_cast<double>(r.samples));
  r.statistic = stat;
  r.p_value = std::erfc(std::abs(stat) / std::sqrt(2.0));
  return r;
}

std::vector<double> sample_losses(std::span<const double> prediction, std::span<const double> target,
                                  std::size_t horizon) {
  require_same(prediction.size(), target.size(), "sample_losses");
  require_rows(target.size(), horizon, "sample_losses");
  std::vector<double> out(target.size() / horizon, 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double e = prediction[i] - target[i];
    out[i / horizon] += e * e / static_cast<double>(horizon);
  }
  return out;
}

}  // namespace ecto::eval
