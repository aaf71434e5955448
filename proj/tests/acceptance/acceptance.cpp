// Acceptance gate: one PASS/FAIL line per criterion. Criteria 6-10 drive the
// real command line (synth, train, eval) in-process on the scaled synthetic
// setup. Usage: acceptance [criterion ...] (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ecto/autodiff/init.hpp"
#include "ecto/autodiff/ops.hpp"
#include "ecto/cli/app.hpp"
#include "ecto/eval/metrics.hpp"
#include "ecto/eval/report.hpp"
#include "ecto/model/ecto.hpp"
#include "ecto/util/io.hpp"
#include "support/gradcheck.hpp"
#include "support/simplex_oracle.hpp"
#include "support/temp_dir.hpp"

using namespace ecto;
using ad::Tensor;
using nlohmann::json;
using testing::gradcheck;
using testing::probe;
using testing::random_tensor;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

// ------------------------------------------------------------ criterion 1

model::ModelConfig gradient_config() {
  model::ModelConfig c;
  c.d_model = 8;
  c.local_channels = 4;
  c.heads = 2;
  c.lookback = 48;
  c.horizon = 8;
  c.short_window = 12;
  c.long_window = 24;
  c.gate_init = 0.0;
  c.variable_names = {"ws_10m", "ws_hub", "wd_hub", "temperature", "noise"};
  c.group_names = {"wind", "atmospheric"};
  c.groups = {{0, 1}, {2, 3, 4}};
  return c;
}

Verdict criterion_gradients() {
  const auto start = Clock::now();
  constexpr int kSeeds = 20;
  constexpr double kTolerance = 1e-4;

  // Each case returns a closure over freshly drawn inputs; the closure is the
  // scalar function whose gradient is checked with respect to `inputs`.
  using Closure = std::function<Tensor()>;
  using Builder = std::function<Closure(std::mt19937_64&, std::vector<Tensor>&)>;
  std::vector<std::pair<std::string, Builder>> cases;
  auto unary = [&](const std::string& name, std::function<Tensor(const Tensor&)> op, double offset = 0.0) {
    cases.emplace_back(name, [op, offset](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
      auto x = random_tensor({3, 5}, rng);
      if (offset != 0.0) {
        for (auto& v : x.mutable_data()) v = std::abs(v) + offset;
      }
      Tensor w;
      {
        ad::NoGradGuard guard;
        w = random_tensor(op(x).shape(), rng);
      }
      in = {x};
      return [=] { return probe(op(x), w); };
    });
  };
  auto binary = [&](const std::string& name, std::function<Tensor(const Tensor&, const Tensor&)> op) {
    cases.emplace_back(name, [op](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
      auto a = random_tensor({2, 3, 4}, rng);
      auto b = random_tensor({3, 1}, rng);
      auto w = random_tensor({2, 3, 4}, rng);
      in = {a, b};
      return [=] { return probe(op(a, b), w); };
    });
  };
  binary("add (broadcast)", ad::add);
  binary("sub (broadcast)", ad::sub);
  binary("mul (broadcast)", ad::mul);
  unary("scale", [](const Tensor& x) { return ad::scale(x, -1.7); });
  unary("add_scalar", [](const Tensor& x) { return ad::add_scalar(x, 0.3); });
  unary("sigmoid", ad::sigmoid);
  unary("tanh", ad::tanh);
  unary("gelu", ad::gelu);
  unary("square", ad::square);
  unary("abs", ad::abs);
  unary("sqrt", ad::sqrt, 0.5);
  unary("softmax", [](const Tensor& x) { return ad::softmax(x, 0.7); });
  unary("sparsemax", [](const Tensor& x) { return ad::sparsemax(x, 0.5); });
  unary("group_topk_softmax", [](const Tensor& x) { return ad::group_topk_softmax(x, {{0, 1}, {2, 3, 4}}, 2, 0.8); });
  unary("sum_axis", [](const Tensor& x) { return ad::sum_axis(x, 0); });
  unary("mean_axis", [](const Tensor& x) { return ad::mean_axis(x, -1); });
  unary("max_axis", [](const Tensor& x) { return ad::max_axis(x, -1); });
  unary("min_axis", [](const Tensor& x) { return ad::min_axis(x, 0); });
  unary("reshape", [](const Tensor& x) { return ad::reshape(x, {5, 3}); });
  unary("transpose_last", ad::transpose_last);
  unary("slice_last", [](const Tensor& x) { return ad::slice_last(x, 1, 3); });
  unary("gather_last", [](const Tensor& x) {
    static const std::vector<std::size_t> idx{4, 0, 0, 2};
    return ad::gather_last(x, idx);
  });
  unary("concat_last", [](const Tensor& x) { return ad::concat_last({x, ad::square(x)}); });
  unary("dropout (fixed mask)", [](const Tensor& x) {
    std::mt19937_64 rng(3);
    return ad::dropout(x, 0.4, true, rng);
  });
  cases.emplace_back("sum / mean", [](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
    auto x = random_tensor({4, 3}, rng);
    in = {x};
    return [=] { return ad::add(ad::sum(ad::square(x)), ad::mean(x)); };
  });
  cases.emplace_back("linear", [](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
    auto x = random_tensor({2, 3, 5}, rng), w = random_tensor({4, 5}, rng), b = random_tensor({4}, rng);
    auto p = random_tensor({2, 3, 4}, rng);
    in = {x, w, b};
    return [=] { return probe(ad::linear(x, w, b), p); };
  });
  cases.emplace_back("linear (width 1, no bias)", [](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
    auto x = random_tensor({3, 6}, rng), w = random_tensor({1, 6}, rng);
    auto p = random_tensor({3, 1}, rng);
    in = {x, w};
    return [=] { return probe(ad::linear(x, w, Tensor{}), p); };
  });
  for (auto mode : {ad::PaddingMode::Zero, ad::PaddingMode::Replicate}) {
    const std::string name = mode == ad::PaddingMode::Zero ? "conv1d (zero pad, stride 2)" : "conv1d (replicate pad)";
    const std::size_t stride = mode == ad::PaddingMode::Zero ? 2 : 1;
    cases.emplace_back(name, [mode, stride](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
      auto x = random_tensor({2, 3, 11}, rng), k = random_tensor({4, 3, 5}, rng), b = random_tensor({4}, rng);
      const std::size_t len = ad::conv1d_output_length(11, 5, stride, 2);
      auto p = random_tensor({2, 4, len}, rng);
      in = {x, k, b};
      return [=] { return probe(ad::conv1d(x, k, b, stride, 2, mode), p); };
    });
  }
  cases.emplace_back("layer_norm", [](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
    auto x = random_tensor({3, 6}, rng), g = random_tensor({6}, rng), b = random_tensor({6}, rng);
    auto p = random_tensor({3, 6}, rng);
    in = {x, g, b};
    return [=] { return probe(ad::layer_norm(x, g, b), p); };
  });
  cases.emplace_back("scaled_dot_attention", [](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
    auto q = random_tensor({2, 3, 4}, rng), k = random_tensor({2, 5, 4}, rng), v = random_tensor({2, 5, 4}, rng);
    auto p = random_tensor({2, 3, 4}, rng);
    in = {q, k, v};
    return [=] { return probe(ad::scaled_dot_attention(q, k, v, 2), p); };
  });
  cases.emplace_back("left_matmul_const", [](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
    auto x = random_tensor({2, 4, 3}, rng);
    auto a = random_tensor({5, 4}, rng);
    auto p = random_tensor({2, 5, 3}, rng);
    std::vector<double> av(a.data().begin(), a.data().end());
    in = {x};
    return [=] { return probe(ad::left_matmul_const(av, 5, x), p); };
  });
  cases.emplace_back("composite loss", [](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
    auto pred = random_tensor({4, 8}, rng), y = random_tensor({4, 8}, rng);
    in = {pred};
    return [=] { return eval::composite_loss(pred, y, 0.05); };
  });
  cases.emplace_back("full model", [](std::mt19937_64& rng, std::vector<Tensor>& in) -> Closure {
    const auto cfg = gradient_config();
    auto m = std::make_shared<model::EctoModel>(cfg, rng());
    auto x = random_tensor({2, cfg.lookback}, rng), xe = random_tensor({2, cfg.lookback, 5}, rng);
    auto p = random_tensor({2, cfg.horizon}, rng);
    const auto params = m->parameters();
    // Exogenous windows enter through fixed summary statistics, so the
    // gradient path starts at the parameters and the target window.
    in = {x};
    for (const auto& [name, t] : params) in.push_back(t);
    return [=] { return probe(m->forward(x, xe, nullptr).final, p); };
  });

  Verdict v;
  std::size_t checks = 0;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, build] : cases) {
    for (int seed = 0; seed < kSeeds; ++seed) {
      std::mt19937_64 rng(1000 + seed);
      std::vector<Tensor> inputs;
      const auto f = build(rng, inputs);
      const bool big = name == "full model";
      const auto r = gradcheck(f, inputs, 1e-5, big ? 24 : 0, 11 + seed);
      ++checks;
      if (r.rel_error > worst) worst = r.rel_error, worst_name = name;
      if (!(r.rel_error < kTolerance)) {
        v.pass = false;
        v.detail += " [" + name + " seed " + std::to_string(seed) + " rel " + fmt(r.rel_error) + "]";
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 120.0) v.pass = false;
  v.detail = std::to_string(cases.size()) + " operations x " + std::to_string(kSeeds) + " seeds (" +
             std::to_string(checks) + " checks), worst rel err " + fmt(worst) + " (" + worst_name + "), " +
             fmt(elapsed, 3) + " s (limit 120 s)" + v.detail;
  return v;
}

// ------------------------------------------------------------ criterion 2

Verdict criterion_sparsemax() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> temperature(0.5, 2.0);
  double worst_value = 0.0, worst_jacobian = 0.0;
  std::size_t zero_violations = 0, jacobians = 0, skipped = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = static_cast<std::size_t>(size(rng));
    const double tau = trial % 2 == 0 ? 1.0 : temperature(rng);
    std::vector<double> z(n);
    for (auto& x : z) x = 1.5 * normal(rng);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = z[i] / tau;
    const auto expected = testing::simplex_projection_oracle(scaled);
    auto x = Tensor::from({n}, z);
    x.set_requires_grad(true);
    const auto p = ad::sparsemax(x, tau);
    for (std::size_t i = 0; i < n; ++i) {
      worst_value = std::max(worst_value, std::abs(p.data()[i] - expected[i]));
      if (expected[i] == 0.0 && p.data()[i] != 0.0) ++zero_violations;
    }

    // The Jacobian is only defined away from support changes.
    double threshold = 0.0;
    std::size_t support = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (expected[i] > 0.0) threshold += scaled[i] - expected[i], ++support;
    }
    threshold /= static_cast<double>(support);
    double margin = std::numeric_limits<double>::infinity();
    for (double s : scaled) margin = std::min(margin, std::abs(s - threshold));
    if (margin < 1e-4) {
      ++skipped;
      continue;
    }
    ++jacobians;
    for (std::size_t out = 0; out < n; ++out) {
      x.zero_grad();
      std::vector<double> e(n, 0.0);
      e[out] = 1.0;
      const auto y = ad::sparsemax(x, tau);
      probe(y, Tensor::from({n}, e)).backward();
      for (std::size_t in = 0; in < n; ++in) {
        const double h = 1e-6;
        auto zp = z, zm = z;
        zp[in] += h;
        zm[in] -= h;
        ad::NoGradGuard guard;
        const double fd = (ad::sparsemax(Tensor::from({n}, zp), tau).data()[out] -
                           ad::sparsemax(Tensor::from({n}, zm), tau).data()[out]) /
                          (2.0 * h);
        worst_jacobian = std::max(worst_jacobian, std::abs(fd - x.grad()[in]));
      }
    }
  }
  Verdict v;
  v.pass = worst_value <= 1e-10 && zero_violations == 0 && worst_jacobian <= 1e-6 && jacobians >= 900;
  v.detail = "1000 vectors n in 2..8: max |p - oracle| " + fmt(worst_value) + " (limit 1e-10), " +
             std::to_string(zero_violations) + " non-zero entries outside the support; Jacobian vs FD on " +
             std::to_string(jacobians) + " vectors (" + std::to_string(skipped) +
             " within 1e-4 of a support change skipped), max abs diff " + fmt(worst_jacobian) + " (limit 1e-6)";
  return v;
}

// ------------------------------------------------------------ criterion 3

model::ModelConfig scaled_model_config() {
  model::ModelConfig c;
  c.d_model = 64;
  c.local_channels = 16;
  c.variable_names = {"ws_10m", "ws_hub", "wd_hub", "temperature", "pressure", "humidity", "noise_1", "noise_2"};
  c.group_names = {"wind", "atmospheric"};
  c.groups = {{0, 1}, {2, 3, 4, 5, 6, 7}};
  return c;
}

Verdict criterion_structure() {
  Verdict v;
  std::ostringstream d;
  auto c = scaled_model_config();
  c.lookback = 96;
  c.token_kernel = 16;
  c.token_stride = 8;
  model::EctoModel m(c, 5);
  std::mt19937_64 data(6);
  const auto x = random_tensor({32, 96}, data);
  const auto xe = random_tensor({32, 96, 8}, data);
  const auto enc = m.tokenizer(x, nullptr);
  const std::size_t tokens = enc.tokens.dim(1);
  const bool tokens_ok = c.num_tokens() == 13 && tokens == 13;
  d << "tokens " << tokens << " (expected 13)";

  const auto out = m.forward(x, xe, nullptr);
  const double eps = std::numeric_limits<double>::epsilon();
  double worst_sum = 0.0, worst_router = 0.0;
  bool product_exact = true, router_positive = true, gain_bounded = true;
  for (std::size_t b = 0; b < 32; ++b) {
    double wg = 0.0, wh = 0.0;
    for (std::size_t g = 0; g < 2; ++g) wg += out.group_weights.at({b, g});
    for (std::size_t dd = 0; dd < 8; ++dd) {
      const std::size_t g = dd < 2 ? 0 : 1;
      wh += out.hier_weights.at({b, dd});
      product_exact &= out.hier_weights.at({b, dd}) == out.group_weights.at({b, g}) * out.variable_weights.at({b, dd});
    }
    worst_sum = std::max(worst_sum, std::abs(wh - wg));
    double r = 0.0;
    for (std::size_t k = 0; k < c.regimes; ++k) {
      r += out.route.at({b, k});
      router_positive &= out.route.at({b, k}) > 0.0;
    }
    worst_router = std::max(worst_router, std::abs(r - 1.0));
  }
  // Gain multiplier bound for open and closed gates on large mixed gains.
  for (double gamma : {-4.0, 0.0, 2.0}) {
    auto e = m.ecrr;
    std::fill(e.gamma_gain.mutable_data().begin(), e.gamma_gain.mutable_data().end(), gamma);
    std::fill(e.gamma_bias.mutable_data().begin(), e.gamma_bias.mutable_data().end(), -1000.0);
    const double s = 1.0 / (1.0 + std::exp(-gamma));
    const model::ExpertMix mix{random_tensor({32, 16}, data, 2.0), random_tensor({32, 16}, data)};
    const auto mult = e.refine_regime(Tensor::full({32, 16}, 1.0), mix);
    for (double g : mult.data()) gain_bounded &= g > 1.0 - s && g < 1.0 + s;
  }
  // Rounding of an 8-term sum of products of simplex weights.
  const bool sums_ok = product_exact && worst_sum <= 8 * eps;
  v.pass = tokens_ok && sums_ok && router_positive && worst_router <= 4 * eps && gain_bounded;
  d << "; w_hier = w_G * alpha bitwise " << (product_exact ? "yes" : "no") << ", max |sum w_hier - sum w_G| "
    << fmt(worst_sum) << " (<= 8 ulp); router simplex max |sum r - 1| " << fmt(worst_router) << ", all r > 0 "
    << (router_positive ? "yes" : "no") << "; gain multiplier inside (1 - s, 1 + s) " << (gain_bounded ? "yes" : "no");
  v.detail = d.str();
  return v;
}

// ------------------------------------------------------------ criterion 4

Verdict criterion_near_identity() {
  Verdict v;
  std::ostringstream d;
  for (std::size_t width : {64, 256}) {
    auto c = scaled_model_config();
    c.d_model = width;
    c.local_channels = width == 256 ? 32 : 16;
    model::EctoModel m(c, 40 + width);
    std::mt19937_64 data(41 + width);
    const auto out = m.forward(random_tensor({100, 96}, data), random_tensor({100, 96, 8}, data), nullptr);
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
      double base_max = 0.0, diff = 0.0;
      for (std::size_t t = 0; t < c.horizon; ++t) {
        base_max = std::max(base_max, std::abs(out.base.at({i, t})));
        diff = std::max(diff, std::abs(out.final.at({i, t}) - out.base.at({i, t})));
      }
      worst_ratio = std::max(worst_ratio, diff / (1.0 + base_max));
    }
    v.pass &= worst_ratio <= 0.05;
    d << (width == 64 ? "" : "; ") << "d_model " << width << ": max |final - base| / (1 + max|base|) "
      << fmt(worst_ratio) << " over 100 samples";
  }
  d << " (limit 0.05)";
  v.detail = d.str();
  return v;
}

// ------------------------------------------------------------ criterion 5

Verdict criterion_metrics() {
  Verdict v;
  std::ostringstream d;
  std::mt19937_64 rng(55);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> y(400);
  for (auto& x : y) x = 3.0 + normal(rng);
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  const std::vector<double> mean_pred(y.size(), ybar);
  const auto nse_perfect = eval::nse(y, y);
  const auto nse_mean = eval::nse(mean_pred, y);
  const bool nse_ok = nse_perfect && *nse_perfect == 1.0 && nse_mean && std::abs(*nse_mean) <= 1e-12;
  d << "NSE(y, y) " << (nse_perfect ? fmt(*nse_perfect, 17) : "undefined") << ", NSE(mean, y) "
    << (nse_mean ? fmt(*nse_mean) : "undefined");

  const std::size_t B = 500, H = 16;
  const double rated = 99.0;
  std::uniform_real_distribution<double> level(0.0, rated);
  std::vector<double> target(B * H), pred(B * H);
  for (std::size_t b = 0; b < B; ++b) {
    double p = level(rng);
    for (std::size_t t = 0; t < H; ++t) {
      p = std::clamp(p + 3.0 * normal(rng), 0.0, rated);
      target[b * H + t] = p;
      pred[b * H + t] = p + 4.0 * normal(rng);
    }
  }
  const auto dec = eval::decompose_errors(pred, target, H, rated);
  double worst_recombine = 0.0;
  for (const auto* table : {&dec.power_bins, &dec.ramp_classes}) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& cell : *table) {
      if (cell.mse_mw2) total += *cell.mse_mw2 * static_cast<double>(cell.count);
      count += cell.count;
    }
    worst_recombine = std::max(worst_recombine, std::abs(total / static_cast<double>(count) - dec.overall_mse_mw2));
  }
  const bool recombine_ok = worst_recombine <= 1e-9;
  d << "; decomposition recombination error " << fmt(worst_recombine) << " MW^2 (limit 1e-9)";

  std::vector<double> la(300), lb(300);
  for (std::size_t i = 0; i < la.size(); ++i) {
    la[i] = std::abs(normal(rng)) + 0.1 * std::sin(0.3 * static_cast<double>(i));
    lb[i] = std::abs(normal(rng)) * 1.1;
  }
  const auto ab = eval::diebold_mariano(la, lb, 16);
  const auto ba = eval::diebold_mariano(lb, la, 16);
  const bool antisym = ab.statistic && ba.statistic && *ab.statistic == -*ba.statistic && *ab.p_value == *ba.p_value;
  d << "; DM(a,b) " << (ab.statistic ? fmt(*ab.statistic, 6) : "undefined") << " vs DM(b,a) "
    << (ba.statistic ? fmt(*ba.statistic, 6) : "undefined");

  bool bartlett_ok = true;
  for (auto [j, h, expected] : std::vector<std::tuple<std::size_t, std::size_t, double>>{
           {0, 16, 1.0}, {1, 16, 0.9375}, {4, 16, 0.75}, {8, 16, 0.5}, {15, 16, 0.0625}, {16, 16, 0.0}, {3, 4, 0.25}}) {
    bartlett_ok &= std::abs(eval::bartlett_weight(j, h) - expected) <= 1e-15;
  }
  d << "; Bartlett (1 - j/h) spot values " << (bartlett_ok ? "match" : "differ");
  v.pass = nse_ok && recombine_ok && antisym && bartlett_ok;
  v.detail = d.str();
  return v;
}

// ------------------------------------------------------- criteria 6 to 10

// Scaled desk configuration shared by the end-to-end criteria.
const char* kScaledConfig = R"({
  "model": {"lookback": 96, "horizon": 16, "d_model": 64, "local_channels": 16, "gate_init": -2.0},
  "training": {"batch_size": 64, "peak_lr": 1e-3, "pct_start": 0.3, "max_epochs": 10, "patience": 10,
               "steps_per_epoch": 150, "max_steps": 1500},
  "synthetic": {"length": 20000}
})";

constexpr std::uint64_t kSeeds[] = {1, 2, 3};
const std::vector<std::string> kVariants = {"none", "no-pgvs", "no-ecrr", "target-only"};

struct RunResult {
  fs::path train_dir;
  fs::path eval_dir;
  json report;
  double seconds = 0.0;
};

class Experiments {
 public:
  explicit Experiments(fs::path root) : root_(std::move(root)) {
    util::write_file_atomic(root_ / "config.json", kScaledConfig);
  }

  const RunResult& get(const std::string& variant, std::uint64_t seed) {
    const auto key = variant + "/" + std::to_string(seed);
    if (auto it = runs_.find(key); it != runs_.end()) return it->second;
    return runs_[key] = run(variant, seed, root_ / "runs");
  }

  // An independent repetition into a separate output root.
  RunResult rerun(const std::string& variant, std::uint64_t seed) { return run(variant, seed, root_ / "rerun"); }

 private:
  static fs::path run_dir(const std::string& out) {
    const std::string marker = "run directory: ";
    const auto pos = out.rfind(marker);
    if (pos == std::string::npos) throw std::runtime_error("command did not report a run directory:\n" + out);
    return out.substr(pos + marker.size(), out.find('\n', pos) - pos - marker.size());
  }

  static fs::path cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != cli::kOk) {
      throw std::runtime_error("ecto " + args.front() + " failed with exit code " + std::to_string(code) + ": " +
                               err.str());
    }
    return run_dir(out.str());
  }

  RunResult run(const std::string& variant, std::uint64_t seed, const fs::path& out) {
    const auto start = Clock::now();
    const auto config = (root_ / "config.json").string();
    const auto s = std::to_string(seed);
    const auto synth = cli({"synth", "--config", config, "--seed", s, "--output-dir", out.string()});
    const auto data = (synth / "data.csv").string(), schema = (synth / "schema.json").string();
    RunResult r;
    r.train_dir = cli({"train", "--config", config, "--seed", s, "--ablate", variant, "--data", data, "--schema",
                       schema, "--output-dir", out.string()});
    r.eval_dir = cli({"eval", "--checkpoint", (r.train_dir / "checkpoint.ecto").string(), "--data", data,
                      "--schema", schema, "--output-dir", out.string()});
    r.report = json::parse(util::read_file(r.eval_dir / "report.json"));
    r.seconds = seconds_since(start);
    std::cerr << "  [" << variant << " seed " << seed << "] " << fmt(r.seconds, 3) << " s, test mse "
              << fmt(model_mse(r.report), 6) << "\n";
    return r;
  }

 public:
  static double model_mse(const json& report) { return report.at("rows")[0].at("metrics").at("mse").get<double>(); }
  static double persistence_mse(const json& report) {
    return report.at("rows")[1].at("metrics").at("mse").get<double>();
  }

 private:
  fs::path root_;
  std::map<std::string, RunResult> runs_;
};

Verdict criterion_end_to_end(Experiments& ex) {
  const auto& r = ex.get("none", kSeeds[0]);
  const double model = Experiments::model_mse(r.report), pers = Experiments::persistence_mse(r.report);
  const double gain = (pers - model) / pers;
  Verdict v;
  v.pass = gain >= 0.10 && r.seconds <= 15.0 * 60.0;
  v.detail = "seed " + std::to_string(kSeeds[0]) + ": test MSE " + fmt(model) + " vs persistence " + fmt(pers) +
             ", improvement " + fmt(100.0 * gain, 3) + "% (limit >= 10%), synth+train+eval " + fmt(r.seconds, 4) +
             " s (limit 900 s)";
  return v;
}

Verdict criterion_ablation(Experiments& ex) {
  std::map<std::string, double> mean;
  for (const auto& variant : kVariants) {
    for (auto seed : kSeeds) mean[variant] += Experiments::model_mse(ex.get(variant, seed).report) / 3.0;
  }
  const double full = mean["none"];
  Verdict v;
  v.pass = full <= mean["no-pgvs"] && full <= mean["no-ecrr"] && full <= mean["target-only"] &&
           mean["target-only"] >= mean["no-pgvs"] && mean["target-only"] >= mean["no-ecrr"];
  std::ostringstream d;
  d << "3-seed mean test MSE: full " << fmt(full, 5);
  for (const auto& variant : {"no-pgvs", "no-ecrr", "target-only"}) {
    d << ", " << variant << " " << fmt(mean[variant], 5) << " (" << (mean[variant] >= full ? "+" : "")
      << fmt(100.0 * (mean[variant] - full) / full, 3) << "%)";
  }
  d << "; required full <= each variant and target-only worst";
  v.detail = d.str();
  return v;
}

Verdict criterion_selection(Experiments& ex) {
  double informative = 0.0, noise = 0.0, active = 0.0;
  std::size_t D = 0;
  for (auto seed : kSeeds) {
    const auto& sel = ex.get("none", seed).report.at("selection");
    const auto w = sel.at("mean_hier_weights").get<std::vector<double>>();
    D = w.size();
    // The synthetic generator's informative channels are the first two.
    informative += (w[0] + w[1]) / 2.0 / 3.0;
    double rest = 0.0;
    for (std::size_t d = 2; d < w.size(); ++d) rest += w[d];
    noise += rest / static_cast<double>(w.size() - 2) / 3.0;
    active += sel.at("active_variables").get<double>() / 3.0;
  }
  Verdict v;
  v.pass = informative >= 2.0 * noise && active < static_cast<double>(D) / 2.0;
  v.detail = "3-seed mean w_hier: informative " + fmt(informative) + ", other channels " + fmt(noise) + ", ratio " +
             fmt(informative / noise, 3) + " (limit >= 2); mean active variables " + fmt(active, 3) + " (limit < " +
             fmt(static_cast<double>(D) / 2.0, 2) + ")";
  return v;
}

Verdict criterion_regimes(Experiments& ex) {
  double separation = 0.0;
  double top = 0.0;
  std::ostringstream per_seed;
  for (auto seed : kSeeds) {
    const auto& reg = ex.get("none", seed).report.at("regimes");
    const auto sep = reg.at("separation");
    const double s = sep.is_null() ? 0.0 : sep.get<double>();
    separation += s / 3.0;
    double seed_top = 0.0;
    for (const auto& row : reg.at("table")) seed_top = std::max(seed_top, row.at("dominant_percent").get<double>());
    top = std::max(top, seed_top);
    per_seed << (seed == kSeeds[0] ? "" : ", ") << fmt(s, 3);
  }
  Verdict v;
  v.pass = separation >= 1.0 && top < 100.0;
  v.detail = "centroid distance / pooled within-cluster std of the two dominant regimes: 3-seed mean " +
             fmt(separation, 3) + " (per seed " + per_seed.str() + "; limit >= 1); largest dominance " + fmt(top, 4) +
             "% (limit < 100%)";
  return v;
}

Verdict criterion_determinism(Experiments& ex) {
  const auto& a = ex.get("none", kSeeds[0]);
  const auto b = ex.rerun("none", kSeeds[0]);
  std::vector<std::string> differing;
  auto compare = [&](const fs::path& x, const fs::path& y) {
    if (util::read_file(x) != util::read_file(y)) differing.push_back(x.filename().string());
  };
  compare(a.train_dir / "checkpoint.ecto", b.train_dir / "checkpoint.ecto");
  compare(a.train_dir / "history.csv", b.train_dir / "history.csv");
  for (const char* f : {"report.json", "per_horizon.csv", "decomposition.csv", "dm_acf.csv", "sample_losses.csv",
                        "forecasts.csv"}) {
    compare(a.eval_dir / f, b.eval_dir / f);
  }
  const bool same_id = a.train_dir.filename() == b.train_dir.filename() && a.eval_dir.filename() == b.eval_dir.filename();
  Verdict v;
  v.pass = differing.empty() && same_id;
  v.detail = "two independent synth+train+eval runs: run ids " + std::string(same_id ? "equal" : "differ") +
             ", checkpoint, history and all report files ";
  if (differing.empty()) {
    v.detail += "bit-identical";
  } else {
    v.detail += "differ in:";
    for (const auto& f : differing) v.detail += " " + f;
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  auto wanted = [&](int c) { return selected.empty() || selected.count(c) > 0; };

  testing::TempDir tmp;
  Experiments ex(tmp.path());
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"gradient suite", criterion_gradients},
      {"sparsemax oracle", criterion_sparsemax},
      {"structural identities", criterion_structure},
      {"near-identity init", criterion_near_identity},
      {"metric closed forms", criterion_metrics},
      {"synthetic end-to-end vs persistence", [&] { return criterion_end_to_end(ex); }},
      {"ablation ordering", [&] { return criterion_ablation(ex); }},
      {"variable selection recovery", [&] { return criterion_selection(ex); }},
      {"regime separation", [&] { return criterion_regimes(ex); }},
      {"determinism", [&] { return criterion_determinism(ex); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!wanted(number)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << number << " " << criteria[i].first << ": " << v.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
