#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ecto/autodiff/ops.hpp"

namespace ecto::ad {

namespace {

void require_temperature(double temperature, const char* op) {
  if (!(temperature > 0.0)) throw std::invalid_argument(std::string(op) + ": temperature must be > 0");
}

std::size_t last_dim(const Tensor& x, const char* op) {
  if (x.rank() == 0 || x.dim(-1) == 0) throw DimensionError(std::string(op) + ": empty last axis");
  return x.dim(-1);
}

// Softmax of z/temperature over [begin, end) of `idx` positions in row.
void softmax_into(const double* row, const std::size_t* idx, std::size_t count, double temperature, double* out) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < count; ++j) mx = std::max(mx, row[idx[j]] / temperature);
  double z = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    out[idx[j]] = std::exp(row[idx[j]] / temperature - mx);
    z += out[idx[j]];
  }
  for (std::size_t j = 0; j < count; ++j) out[idx[j]] /= z;
}

}  // namespace

Tensor softmax(const Tensor& x, double temperature) {
  require_temperature(temperature, "softmax");
  const std::size_t n = last_dim(x, "softmax");
  const std::size_t rows = x.size() / n;
  std::vector<std::size_t> iota(n);
  std::iota(iota.begin(), iota.end(), 0);
  std::vector<double> out(x.size());
  const auto xv = x.data();
  for (std::size_t r = 0; r < rows; ++r) softmax_into(xv.data() + r * n, iota.data(), n, temperature, out.data() + r * n);
  auto nx = x.node();
  return detail::make_result("softmax", x.shape(), std::move(out), {x}, [nx, n, rows, temperature](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = self.value.data() + r * n;
      const double* g = self.grad.data() + r * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += y[j] * g[j];
      for (std::size_t j = 0; j < n; ++j) dx[r * n + j] += y[j] * (g[j] - dot) / temperature;
    }
  });
}

Tensor sparsemax(const Tensor& x, double temperature) {
  require_temperature(temperature, "sparsemax");
  const std::size_t n = last_dim(x, "sparsemax");
  const std::size_t rows = x.size() / n;
  const auto xv = x.data();
  std::vector<double> out(x.size());
  std::vector<double> z(n);
  std::vector<std::size_t> order(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) z[j] = xv[r * n + j] / temperature;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
    // support size k(z) = max{k : 1 + k z_(k) > sum_{j<=k} z_(j)}
    double cumsum = 0.0;
    double support_sum = 0.0;
    std::size_t support = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double zk = z[order[k - 1]];
      cumsum += zk;
      if (1.0 + static_cast<double>(k) * zk > cumsum) {
        support = k;
        support_sum = cumsum;
      }
    }
    const double threshold = (support_sum - 1.0) / static_cast<double>(support);
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = std::max(z[j] - threshold, 0.0);
  }
  auto nx = x.node();
  return detail::make_result("sparsemax", x.shape(), std::move(out), {x}, [nx, n, rows, temperature](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* p = self.value.data() + r * n;
      const double* g = self.grad.data() + r * n;
      double total = 0.0;
      std::size_t count = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (p[j] > 0.0) {
          total += g[j];
          ++count;
        }
      }
      const double avg = total / static_cast<double>(count);
      for (std::size_t j = 0; j < n; ++j) {
        if (p[j] > 0.0) dx[r * n + j] += (g[j] - avg) / temperature;
      }
    }
  });
}

Tensor group_topk_softmax(const Tensor& x, const std::vector<std::vector<std::size_t>>& groups, std::size_t k,
                          double temperature) {
  require_temperature(temperature, "group_topk_softmax");
  const std::size_t n = last_dim(x, "group_topk_softmax");
  const std::size_t rows = x.size() / n;
  for (const auto& g : groups) {
    for (auto idx : g) {
      if (idx >= n) throw DimensionError("group_topk_softmax: group member out of range");
    }
  }
  const auto xv = x.data();
  std::vector<double> out(x.size(), 0.0);
  // survivors[r] lists, per group, the indices kept for row r (flattened).
  auto survivors = std::make_shared<std::vector<std::vector<std::size_t>>>(rows * groups.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xv.data() + r * n;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::vector<std::size_t> members = groups[g];
      if (k > 0 && members.size() > k) {
        std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
          if (row[a] != row[b]) return row[a] > row[b];
          return a < b;
        });
        members.resize(k);
        std::sort(members.begin(), members.end());
      }
      softmax_into(row, members.data(), members.size(), temperature, out.data() + r * n);
      (*survivors)[r * groups.size() + g] = std::move(members);
    }
  }
  auto nx = x.node();
  const std::size_t n_groups = groups.size();
  return detail::make_result("group_topk_softmax", x.shape(), std::move(out), {x},
                             [nx, n, rows, n_groups, survivors, temperature](Node& self) {
                               auto& dx = nx->ensure_grad();
                               for (std::size_t r = 0; r < rows; ++r) {
                                 const double* y = self.value.data() + r * n;
                                 const double* gr = self.grad.data() + r * n;
                                 for (std::size_t g = 0; g < n_groups; ++g) {
                                   const auto& members = (*survivors)[r * n_groups + g];
                                   double dot = 0.0;
                                   for (auto j : members) dot += y[j] * gr[j];
                                   for (auto j : members) dx[r * n + j] += y[j] * (gr[j] - dot) / temperature;
                                 }
                               }
                             });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const std::size_t n = last_dim(x, "layer_norm");
  if (gamma.size() != n || beta.size() != n) throw DimensionError("layer_norm: affine parameters must match last axis");
  const std::size_t rows = x.size() / n;
  const auto xv = x.data();
  const auto gv = gamma.data();
  const auto bv = beta.data();
  auto xhat = std::make_shared<std::vector<double>>(x.size());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  std::vector<double> out(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xv.data() + r * n;
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(n);
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = (row[j] - mu) * is;
      (*xhat)[r * n + j] = h;
      out[r * n + j] = h * gv[j] + bv[j];
    }
  }
  auto nx = x.node();
  auto ng = gamma.node();
  auto nb = beta.node();
  return detail::make_result("layer_norm", x.shape(), std::move(out), {x, gamma, beta},
                             [=](Node& self) {
                               std::vector<double> dh(n);
                               for (std::size_t r = 0; r < rows; ++r) {
                                 const double* g = self.grad.data() + r * n;
                                 const double* h = xhat->data() + r * n;
                                 if (ng->requires_grad) {
                                   auto& dg = ng->ensure_grad();
                                   for (std::size_t j = 0; j < n; ++j) dg[j] += g[j] * h[j];
                                 }
                                 if (nb->requires_grad) {
                                   auto& db = nb->ensure_grad();
                                   for (std::size_t j = 0; j < n; ++j) db[j] += g[j];
                                 }
                                 if (nx->requires_grad) {
                                   double mean_dh = 0.0, mean_dh_h = 0.0;
                                   for (std::size_t j = 0; j < n; ++j) {
                                     dh[j] = g[j] * ng->value[j];
                                     mean_dh += dh[j];
                                     mean_dh_h += dh[j] * h[j];
                                   }
                                   mean_dh /= static_cast<double>(n);
                                   mean_dh_h /= static_cast<double>(n);
                                   auto& dx = nx->ensure_grad();
                                   for (std::size_t j = 0; j < n; ++j) {
                                     dx[r * n + j] += (*inv_std)[r] * (dh[j] - mean_dh - h[j] * mean_dh_h);
                                   }
                                 }
                               }
                             });
}

Tensor dropout(const Tensor& x, double rate, bool training, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must be in [0, 1)");
  if (!training || rate == 0.0) return x;
  const double keep = 1.0 - rate;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto mask = std::make_shared<std::vector<double>>(x.size());
  for (auto& m : *mask) m = uniform(rng) < keep ? 1.0 / keep : 0.0;
  const auto xv = x.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * (*mask)[i];
  auto nx = x.node();
  return detail::make_result("dropout", x.shape(), std::move(out), {x}, [nx, mask](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[i] * (*mask)[i];
  });
}

}  // namespace ecto::ad
