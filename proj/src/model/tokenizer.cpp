#include "ecto/model/tokenizer.hpp"

#include "ecto/autodiff/init.hpp"

namespace ecto::model {

Tensor target_statistics(const Tensor& x, std::size_t short_window) {
  if (x.rank() != 2) throw ad::DimensionError("target_statistics: expected [B, T], got " + ad::shape_str(x.shape()));
  const std::size_t T = x.dim(1);
  if (short_window < 2 || short_window > T) throw ad::DimensionError("target_statistics: bad short window");
  const auto mean = ad::mean_axis(x, 1);
  const auto centered = ad::sub(x, ad::reshape(mean, {x.dim(0), 1}));
  const auto std = ad::sqrt(ad::add_scalar(ad::mean_axis(ad::square(centered), 1), 1e-8));
  const auto lo = ad::min_axis(x, 1);
  const auto hi = ad::max_axis(x, 1);
  const auto range = ad::sub(hi, lo);

  // Least-squares slope over the trailing window as a fixed linear functional.
  const double tbar = 0.5 * static_cast<double>(short_window - 1);
  double denom = 0.0;
  for (std::size_t t = 0; t < short_window; ++t) denom += (t - tbar) * (t - tbar);
  std::vector<double> w(short_window);
  for (std::size_t t = 0; t < short_window; ++t) w[t] = (static_cast<double>(t) - tbar) / denom;
  const auto tail = ad::slice_last(x, T - short_window, short_window);
  const auto slope = ad::linear(tail, Tensor::from({1, short_window}, w), Tensor{});

  const std::size_t B = x.dim(0);
  auto col = [B](const Tensor& v) { return ad::reshape(v, {B, 1}); };
  return ad::concat_last({col(mean), col(std), col(lo), col(hi), col(range), slope});
}

Tokenizer::Tokenizer(const ModelConfig& cfg, std::mt19937_64& rng)
    : lookback_(cfg.lookback),
      local_kernel_(cfg.local_kernel),
      token_stride_(cfg.token_stride),
      token_padding_(cfg.token_padding()),
      short_window_(cfg.short_window),
      dropout_(cfg.embedding_dropout) {
  const std::size_t c = cfg.local_channels;
  const std::size_t d = cfg.d_model;
  local_kernels = ad::fan_in_uniform({c, 1, cfg.local_kernel}, cfg.local_kernel, rng);
  local_bias = Tensor::zeros({c}, true);
  token_kernels = ad::fan_in_uniform({d, c, cfg.token_kernel}, c * cfg.token_kernel, rng);
  token_bias = Tensor::zeros({d}, true);
  positional = ad::normal_init({cfg.num_tokens(), d}, 0.02, rng);
  pool = Linear::init(3 * c, d, rng);
  state_mlp = Mlp::init(2 * d + kTargetStats, d, d, rng);
}

TargetEncoding Tokenizer::operator()(const Tensor& x_tar, std::mt19937_64* dropout_rng) const {
  if (x_tar.rank() != 2 || x_tar.dim(1) != lookback_) {
    throw ad::DimensionError("tokenize: expected [B, " + std::to_string(lookback_) + "], got " +
                             ad::shape_str(x_tar.shape()));
  }
  const std::size_t B = x_tar.dim(0);
  const auto x = ad::reshape(x_tar, {B, 1, lookback_});

  TargetEncoding enc;
  enc.features = ad::gelu(ad::conv1d(x, local_kernels, local_bias, 1, (local_kernel_ - 1) / 2, ad::PaddingMode::Replicate));
  const auto raw_tokens =
      ad::conv1d(enc.features, token_kernels, token_bias, token_stride_, token_padding_, ad::PaddingMode::Replicate);
  const auto tokens = ad::add(ad::transpose_last(raw_tokens), positional);
  enc.token_mean = ad::mean_axis(tokens, 1);
  enc.tokens = dropout_rng ? ad::dropout(tokens, dropout_, true, *dropout_rng) : tokens;

  const std::size_t c = enc.features.dim(1);
  const auto last = ad::reshape(ad::slice_last(enc.features, lookback_ - 1, 1), {B, c});
  const auto pooled = pool(ad::concat_last({ad::mean_axis(enc.features, 2), ad::max_axis(enc.features, 2), last}));
  enc.stats = target_statistics(x_tar, short_window_);
  enc.state = state_mlp(ad::concat_last({pooled, enc.token_mean, enc.stats}));
  return enc;
}

void Tokenizer::collect(ParameterMap& out, const std::string& prefix) const {
  out.emplace(prefix + ".local_conv.weight", local_kernels);
  out.emplace(prefix + ".local_conv.bias", local_bias);
  out.emplace(prefix + ".token_conv.weight", token_kernels);
  out.emplace(prefix + ".token_conv.bias", token_bias);
  out.emplace(prefix + ".positional", positional);
  pool.collect(out, prefix + ".pool");
  state_mlp.collect(out, prefix + ".state_mlp");
}

}  // namespace ecto::model
