#include "ecto/model/pgvs.hpp"

#include <cmath>

namespace ecto::model {

std::vector<double> exogenous_statistics(std::span<const double> x, std::size_t B, std::size_t T, std::size_t D,
                                         std::size_t ts, std::size_t tl) {
  if (tl > T) throw ConfigError("long window " + std::to_string(tl) + " exceeds lookback " + std::to_string(T));
  if (x.size() != B * T * D) throw ad::DimensionError("exogenous_statistics: buffer size mismatch");
  std::vector<double> f(B * D * kExoStats);
  auto moments = [&](std::size_t b, std::size_t d, std::size_t w, double& mu, double& sd) {
    double s = 0.0;
    for (std::size_t t = T - w; t < T; ++t) s += x[(b * T + t) * D + d];
    mu = s / static_cast<double>(w);
    double ss = 0.0;
    for (std::size_t t = T - w; t < T; ++t) {
      const double e = x[(b * T + t) * D + d] - mu;
      ss += e * e;
    }
    sd = std::sqrt(ss / static_cast<double>(w));
  };
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t d = 0; d < D; ++d) {
      double* out = f.data() + (b * D + d) * kExoStats;
      const double last = x[(b * T + T - 1) * D + d];
      moments(b, d, ts, out[0], out[1]);
      out[2] = last;
      moments(b, d, tl, out[3], out[4]);
      out[5] = last;
    }
  }
  return f;
}

BilinearScorer BilinearScorer::init(std::size_t d, std::size_t r, std::mt19937_64& rng) {
  return {Linear::init(d, r, rng, false), Linear::init(d, r, rng, false), Linear::init(d, r, rng, false),
          Linear::init(d, d, rng, false), Linear::init(r, 1, rng, false)};
}

Tensor BilinearScorer::operator()(const Tensor& h, const Tensor& s) const {
  const std::size_t B = s.dim(0);
  const std::size_t M = s.dim(1);
  const std::size_t d = h.dim(1);
  const auto hh = ad::reshape(w_h(h), {B, 1, w_h.weight.dim(0)});
  const auto proj = ad::reshape(w_proj(h), {B, 1, d});
  const auto inner = ad::add(ad::add(hh, w_s(s)), w_hs(ad::mul(proj, s)));
  return ad::reshape(v(ad::tanh(inner)), {B, M});
}

void BilinearScorer::collect(ParameterMap& out, const std::string& prefix) const {
  w_h.collect(out, prefix + ".w_h");
  w_s.collect(out, prefix + ".w_s");
  w_hs.collect(out, prefix + ".w_hs");
  w_proj.collect(out, prefix + ".w_proj");
  v.collect(out, prefix + ".v");
}

Pgvs::Pgvs(const ModelConfig& cfg, std::mt19937_64& rng)
    : groups_(cfg.groups),
      lookback_(cfg.lookback),
      short_window_(cfg.short_window),
      long_window_(cfg.long_window),
      top_k_(cfg.ablation == Ablation::NoTopK ? 0 : cfg.top_k),
      group_temperature_(cfg.group_temperature),
      variable_temperature_(cfg.variable_temperature),
      ablation_(cfg.ablation) {
  const std::size_t d = cfg.d_model;
  exo_mlp = Mlp::init(kExoStats, d, d, rng);
  group_scorer = BilinearScorer::init(d, cfg.rank(), rng);
  variable_scorer = BilinearScorer::init(d, cfg.rank(), rng);

  const std::size_t D = cfg.num_variables();
  const std::size_t G = groups_.size();
  group_of_.assign(D, 0);
  average_matrix_.assign(G * D, 0.0);
  membership_matrix_.assign(G * D, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    for (auto m : groups_[g]) {
      group_of_[m] = g;
      average_matrix_[g * D + m] = 1.0 / static_cast<double>(groups_[g].size());
      membership_matrix_[g * D + m] = 1.0;
    }
  }
}

ExoEncoding Pgvs::encode(const Tensor& x_exo) const {
  if (x_exo.rank() != 3 || x_exo.dim(1) != lookback_ || x_exo.dim(2) != group_of_.size()) {
    throw ad::DimensionError("pgvs: expected exogenous input [B, " + std::to_string(lookback_) + ", " +
                             std::to_string(group_of_.size()) + "], got " + ad::shape_str(x_exo.shape()));
  }
  const std::size_t B = x_exo.dim(0);
  const std::size_t D = x_exo.dim(2);
  ExoEncoding enc;
  enc.features = Tensor::from({B, D, kExoStats},
                              exogenous_statistics(x_exo.data(), B, lookback_, D, short_window_, long_window_));
  enc.embeddings = exo_mlp(enc.features);
  return enc;
}

Tensor Pgvs::group_summaries(const Tensor& embeddings) const {
  return ad::left_matmul_const(average_matrix_, groups_.size(), embeddings);
}

Tensor Pgvs::score_groups(const Tensor& h_tar, const Tensor& summaries) const {
  return ad::sparsemax(group_scorer(h_tar, summaries), group_temperature_);
}

SelectionResult Pgvs::select_variables(const Tensor& h_tar, const Tensor& embeddings, const Tensor& summaries,
                                       const Tensor& group_weights) const {
  const std::size_t B = embeddings.dim(0);
  const std::size_t D = embeddings.dim(1);
  const std::size_t G = groups_.size();
  SelectionResult sel;
  sel.group_summaries = summaries;
  sel.group_weights = group_weights;
  sel.variable_logits = variable_scorer(h_tar, embeddings);
  sel.variable_weights = ad::group_topk_softmax(sel.variable_logits, groups_, top_k_, variable_temperature_);
  sel.hier_weights = ad::mul(ad::gather_last(group_weights, group_of_), sel.variable_weights);

  const auto weighted = ad::mul(embeddings, ad::reshape(sel.variable_weights, {B, D, 1}));
  const auto per_group = ad::left_matmul_const(membership_matrix_, G, weighted);
  const auto gw = ad::reshape(group_weights, {B, G, 1});
  sel.context = ad::mul(per_group, gw);
  sel.summary = ad::sum_axis(ad::mul(summaries, gw), 1);
  return sel;
}

SelectionResult Pgvs::operator()(const Tensor& h_tar, const Tensor& x_exo) const {
  const auto enc = encode(x_exo);
  const auto summaries = group_summaries(enc.embeddings);
  const std::size_t B = x_exo.dim(0);
  const std::size_t G = groups_.size();
  const std::size_t D = group_of_.size();

  if (ablation_ == Ablation::NoPgvs) {
    // One group, every variable weighted 1/D: context and summary are the plain mean.
    SelectionResult sel;
    sel.group_summaries = summaries;
    sel.group_weights = Tensor::full({B, 1}, 1.0);
    sel.variable_weights = Tensor::full({B, D}, 1.0 / static_cast<double>(D));
    sel.hier_weights = sel.variable_weights;
    sel.context = summaries;
    sel.summary = ad::reshape(summaries, {B, summaries.dim(2)});
    return sel;
  }

  Tensor group_weights;
  Tensor logits;
  if (ablation_ == Ablation::NoGroupScoring) {
    group_weights = Tensor::full({B, G}, 1.0 / static_cast<double>(G));
  } else {
    logits = ad::scale(group_scorer(h_tar, summaries), 1.0 / group_temperature_);
    group_weights = ad::sparsemax(logits);
  }
  auto sel = select_variables(h_tar, enc.embeddings, summaries, group_weights);
  sel.group_logits = logits;
  return sel;
}

void Pgvs::collect(ParameterMap& out, const std::string& prefix) const {
  exo_mlp.collect(out, prefix + ".exo_mlp");
  if (ablation_ == Ablation::NoPgvs) return;
  if (ablation_ != Ablation::NoGroupScoring) group_scorer.collect(out, prefix + ".group_scorer");
  variable_scorer.collect(out, prefix + ".variable_scorer");
}

SparsityStats sparsity_stats(std::span<const double> w) {
  SparsityStats st;
  if (w.empty()) return st;
  const double D = static_cast<double>(w.size());
  double entropy = 0.0;
  for (double v : w) {
    if (v > 1.0 / D) st.active += 1.0;
    if (v > 0.0) entropy -= v * std::log(v);
  }
  st.perplexity = std::exp(entropy);
  st.normalized_entropy = w.size() > 1 ? entropy / std::log(D) : 0.0;
  return st;
}

}  // namespace ecto::model
