#pragma once

// Brute-force Euclidean projection onto the probability simplex. Every
// support set S is tried: on S the constrained minimizer is the affine
// projection p_i = z_i − (Σ_S z − 1)/|S|, which is feasible only when all of
// those entries are nonnegative. The projection is the feasible candidate
// closest to z. Exponential in n; fine for n ≤ 10.

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ecto::testing {

inline std::vector<double> simplex_projection_oracle(const std::vector<double>& z) {
  const std::size_t n = z.size();
  if (n == 0 || n > 20) throw std::invalid_argument("oracle supports 1..20 entries");
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        total += z[i];
        ++count;
      }
    }
    const double shift = (total - 1.0) / static_cast<double>(count);
    std::vector<double> p(n, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        p[i] = z[i] - shift;
        if (p[i] < 0.0) feasible = false;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) dist += (p[i] - z[i]) * (p[i] - z[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

}  // namespace ecto::testing
