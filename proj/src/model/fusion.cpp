#include "ecto/model/fusion.hpp"

namespace ecto::model {

Fusion::Fusion(const ModelConfig& cfg, std::mt19937_64& rng) : heads_(cfg.heads) {
  const std::size_t d = cfg.d_model;
  context_proj = Linear::init(d, d, rng, false);
  query_norm = LayerNorm::init(d);
  q_proj = Linear::init(d, d, rng);
  k_proj = Linear::init(d, d, rng, false);
  v_proj = Linear::init(d, d, rng, false);
  out_proj = Linear::init(d, d, rng, false);
  proj = Mlp::init(d, d, d, rng, false);
  eta = constant_parameter({1}, cfg.gate_init);
  ffn = Mlp::init(d, cfg.ffn_multiplier * d, d, rng);
}

Tensor Fusion::attend(const Tensor& tokens, const Tensor& context) const {
  const auto keys = context_proj(context);
  const auto q = q_proj(query_norm(tokens));
  return out_proj(ad::scaled_dot_attention(q, k_proj(keys), v_proj(keys), heads_));
}

Tensor Fusion::operator()(const Tensor& tokens, const Tensor& context) const {
  const auto injected = ad::mul(ad::sigmoid(eta), proj(attend(tokens, context)));
  const auto u = ad::add(tokens, injected);
  return ad::add(u, ffn(u));
}

Tensor Fusion::without_context(const Tensor& tokens) const { return ad::add(tokens, ffn(tokens)); }

void Fusion::collect(ParameterMap& out, const std::string& prefix, bool with_attention) const {
  ffn.collect(out, prefix + ".ffn");
  if (!with_attention) return;
  context_proj.collect(out, prefix + ".context_proj");
  query_norm.collect(out, prefix + ".query_norm");
  q_proj.collect(out, prefix + ".q_proj");
  k_proj.collect(out, prefix + ".k_proj");
  v_proj.collect(out, prefix + ".v_proj");
  out_proj.collect(out, prefix + ".out_proj");
  proj.collect(out, prefix + ".proj");
  out.emplace(prefix + ".eta", eta);
}

DualHead::DualHead(const ModelConfig& cfg, std::mt19937_64& rng) : dropout_(cfg.head_dropout) {
  const std::size_t flat = cfg.num_tokens() * cfg.d_model;
  short_head = Linear::init(flat, cfg.horizon / 2, rng);
  long_head = Linear::init(flat, cfg.horizon / 2, rng);
}

Tensor DualHead::operator()(const Tensor& fused, std::mt19937_64* dropout_rng) const {
  const std::size_t B = fused.dim(0);
  const auto flat = ad::reshape(fused, {B, fused.dim(1) * fused.dim(2)});
  auto branch = [&](const Linear& head) {
    return head(dropout_rng ? ad::dropout(flat, dropout_, true, *dropout_rng) : flat);
  };
  const auto first = branch(short_head);
  const auto second = branch(long_head);
  return ad::concat_last({first, second});
}

void DualHead::collect(ParameterMap& out, const std::string& prefix) const {
  short_head.collect(out, prefix + ".short");
  long_head.collect(out, prefix + ".long");
}

}  // namespace ecto::model
