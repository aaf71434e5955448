#include "ecto/model/ecrr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ecto/autodiff/init.hpp"

namespace ecto::model {

Ecrr::Ecrr(const ModelConfig& cfg, std::mt19937_64& rng)
    : regimes_(cfg.regimes), horizon_(cfg.horizon), ablation_(cfg.ablation) {
  const std::size_t q = 2 * cfg.d_model;
  const std::size_t dh = cfg.d_model;
  router = Linear::init(q, cfg.regimes, rng);
  gain_heads = Linear::init(q, cfg.regimes * cfg.horizon, rng);
  bias_heads = Linear::init(q, cfg.regimes * cfg.horizon, rng);
  gamma_gain = constant_parameter({cfg.horizon}, cfg.gate_init);
  gamma_bias = constant_parameter({cfg.horizon}, cfg.gate_init);
  gamma_horizon = constant_parameter({cfg.horizon}, cfg.gate_init);
  horizon_embedding = ad::normal_init({cfg.horizon, dh}, 0.02, rng);
  context_mlp = Mlp::init(q, dh, dh, rng);
  delta_mlp = Mlp::init(dh, dh / 2, 1, rng);
}

Tensor Ecrr::route_logits(const Tensor& q) const { return router(q); }

Tensor Ecrr::route(const Tensor& q) const { return ad::softmax(route_logits(q)); }

Tensor Ecrr::reshape_experts(const Tensor& flat) const {
  return ad::reshape(flat, {flat.dim(0), regimes_, horizon_});
}

ExpertMix Ecrr::mix(const Tensor& q, const Tensor& r) const {
  const auto weights = ad::reshape(r, {r.dim(0), regimes_, 1});
  return {ad::sum_axis(ad::mul(expert_gains(q), weights), 1), ad::sum_axis(ad::mul(expert_biases(q), weights), 1)};
}

Tensor Ecrr::refine_regime(const Tensor& base, const ExpertMix& m) const {
  const auto gain = ad::add_scalar(ad::mul(ad::sigmoid(gamma_gain), ad::tanh(m.gain)), 1.0);
  return ad::add(ad::mul(gain, base), ad::mul(ad::sigmoid(gamma_bias), m.bias));
}

Tensor Ecrr::horizon_corrections(const Tensor& q) const {
  const std::size_t B = q.dim(0);
  const auto ctx = context_mlp(q);
  const auto c = ad::reshape(ctx, {B, 1, ctx.dim(1)});
  const auto feat = ad::add(ad::add(c, horizon_embedding), ad::mul(c, horizon_embedding));
  return ad::reshape(delta_mlp(feat), {B, horizon_});
}

Tensor Ecrr::refine_horizon(const Tensor& regime, const Tensor& q) const {
  return ad::add(regime, ad::mul(ad::sigmoid(gamma_horizon), horizon_corrections(q)));
}

void Ecrr::collect(ParameterMap& out, const std::string& prefix) const {
  if (ablation_ == Ablation::NoEcrr) return;
  if (ablation_ != Ablation::NoRegime) {
    router.collect(out, prefix + ".router");
    gain_heads.collect(out, prefix + ".gain_heads");
    bias_heads.collect(out, prefix + ".bias_heads");
    out.emplace(prefix + ".gamma_gain", gamma_gain);
    out.emplace(prefix + ".gamma_bias", gamma_bias);
  }
  if (ablation_ != Ablation::NoHorizon) {
    out.emplace(prefix + ".gamma_horizon", gamma_horizon);
    out.emplace(prefix + ".horizon_embedding", horizon_embedding);
    context_mlp.collect(out, prefix + ".context_mlp");
    delta_mlp.collect(out, prefix + ".delta_mlp");
  }
}

std::size_t dominant_regime(std::span<const double> route) {
  return static_cast<std::size_t>(std::max_element(route.begin(), route.end()) - route.begin());
}

std::vector<RegimeSummary> regime_statistics(const std::vector<RegimeTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("regime_statistics: no traces");
  const std::size_t K = traces.front().route.size();
  std::vector<RegimeSummary> out(K);
  for (const auto& t : traces) {
    for (std::size_t k = 0; k < K; ++k) out[k].mean_weight += t.route[k];
    auto& dom = out[t.dominant];
    ++dom.count;
    dom.mean_gain += t.mean_gain;
    dom.mean_bias += t.mean_bias;
  }
  const double n = static_cast<double>(traces.size());
  for (auto& s : out) {
    s.mean_weight /= n;
    s.dominant_percent = 100.0 * static_cast<double>(s.count) / n;
    if (s.count == 0) {
      s.mean_gain = s.mean_bias = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.mean_gain /= static_cast<double>(s.count);
      s.mean_bias /= static_cast<double>(s.count);
    }
  }
  return out;
}

double regime_separation(const std::vector<RegimeTrace>& traces) {
  if (traces.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto stats = regime_statistics(traces);
  std::vector<std::size_t> order(stats.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return stats[a].count > stats[b].count; });
  if (order.size() < 2 || stats[order[1]].count == 0) return std::numeric_limits<double>::quiet_NaN();
  const auto& a = stats[order[0]];
  const auto& b = stats[order[1]];
  double within = 0.0;
  std::size_t n = 0;
  for (const auto& t : traces) {
    const RegimeSummary* own = t.dominant == order[0] ? &a : (t.dominant == order[1] ? &b : nullptr);
    if (!own) continue;
    within += std::pow(t.mean_gain - own->mean_gain, 2) + std::pow(t.mean_bias - own->mean_bias, 2);
    ++n;
  }
  const double pooled = std::sqrt(within / static_cast<double>(n));
  const double between = std::hypot(a.mean_gain - b.mean_gain, a.mean_bias - b.mean_bias);
  if (pooled == 0.0) return between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return between / pooled;
}

}  // namespace ecto::model
