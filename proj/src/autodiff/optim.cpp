#include "ecto/autodiff/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecto::ad {

OptimizerState make_optimizer_state(const ParameterMap& params, OneCycleConfig schedule) {
  OptimizerState state;
  state.schedule = schedule;
  for (const auto& [name, p] : params) {
    state.first_moment[name].assign(p.size(), 0.0);
    state.second_moment[name].assign(p.size(), 0.0);
  }
  return state;
}

void adam_step(ParameterMap& params, OptimizerState& state, double lr, const AdamConfig& config) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (auto& [name, p] : params) {
    auto m_it = state.first_moment.find(name);
    auto v_it = state.second_moment.find(name);
    if (m_it == state.first_moment.end() || v_it == state.second_moment.end() || m_it->second.size() != p.size()) {
      throw DimensionError("adam_step: optimizer state does not match parameter " + name);
    }
    auto& m = m_it->second;
    auto& v = v_it->second;
    auto w = p.mutable_data();
    const auto g = p.grad();
    const bool has_grad = p.has_grad();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = has_grad ? g[i] : 0.0;
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * gi;
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * gi * gi;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

double onecycle_lr(std::size_t step, std::size_t total_steps, double peak_lr, double pct_start, double div_start,
                   double div_final) {
  if (total_steps == 0 || step > total_steps) {
    throw std::out_of_range("onecycle_lr: step " + std::to_string(step) + " outside [0, " +
                            std::to_string(total_steps) + "]");
  }
  const double initial = peak_lr / div_start;
  const double final_lr = peak_lr / div_final;
  const auto warmup = static_cast<std::size_t>(std::llround(pct_start * static_cast<double>(total_steps)));
  auto cosine = [](double from, double to, double frac) {
    return to + (from - to) * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
  };
  if (step <= warmup) {
    if (warmup == 0) return peak_lr;
    return cosine(initial, peak_lr, static_cast<double>(step) / static_cast<double>(warmup));
  }
  const double frac = static_cast<double>(step - warmup) / static_cast<double>(total_steps - warmup);
  return cosine(peak_lr, final_lr, frac);
}

}  // namespace ecto::ad
