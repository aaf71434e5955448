#include <cmath>
#include <numbers>

#include "ecto/autodiff/ops.hpp"

namespace ecto::ad {

namespace {

struct BroadcastPlan {
  Shape out;
  std::vector<std::size_t> stride_a;
  std::vector<std::size_t> stride_b;
  enum class Kind { Same, BSuffix, ASuffix, General } kind = Kind::General;
};

std::vector<std::size_t> padded_strides(const Shape& shape, const Shape& out) {
  const std::size_t r = out.size();
  const std::size_t off = r - shape.size();
  std::vector<std::size_t> strides(r, 0);
  std::size_t s = 1;
  for (std::size_t i = r; i-- > off;) {
    const std::size_t d = shape[i - off];
    strides[i] = (d == 1 && out[i] != 1) ? 0 : s;
    s *= d;
  }
  return strides;
}

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.begin(), small.end(), big.end() - static_cast<std::ptrdiff_t>(small.size()));
}

BroadcastPlan plan(const Shape& a, const Shape& b, const char* op) {
  BroadcastPlan p;
  const std::size_t r = std::max(a.size(), b.size());
  p.out.assign(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t da = i + a.size() >= r ? a[i + a.size() - r] : 1;
    const std::size_t db = i + b.size() >= r ? b[i + b.size() - r] : 1;
    if (da != db && da != 1 && db != 1) {
      throw DimensionError(std::string(op) + ": cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    }
    p.out[i] = std::max(da, db);
  }
  if (a == b) {
    p.kind = BroadcastPlan::Kind::Same;
  } else if (a == p.out && is_suffix(b, a)) {
    p.kind = BroadcastPlan::Kind::BSuffix;
  } else if (b == p.out && is_suffix(a, b)) {
    p.kind = BroadcastPlan::Kind::ASuffix;
  } else {
    p.stride_a = padded_strides(a, p.out);
    p.stride_b = padded_strides(b, p.out);
  }
  return p;
}

// Calls fn(i, ia, ib) for every output element.
template <typename Fn>
void for_each(const BroadcastPlan& p, std::size_t na, std::size_t nb, Fn&& fn) {
  const std::size_t n = shape_size(p.out);
  switch (p.kind) {
    case BroadcastPlan::Kind::Same:
      for (std::size_t i = 0; i < n; ++i) fn(i, i, i);
      return;
    case BroadcastPlan::Kind::BSuffix:
      for (std::size_t i = 0; i < n; ++i) fn(i, i, i % nb);
      return;
    case BroadcastPlan::Kind::ASuffix:
      for (std::size_t i = 0; i < n; ++i) fn(i, i % na, i);
      return;
    case BroadcastPlan::Kind::General:
      break;
  }
  const std::size_t r = p.out.size();
  std::vector<std::size_t> counter(r, 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < n; ++i) {
    fn(i, ia, ib);
    for (std::size_t d = r; d-- > 0;) {
      ++counter[d];
      ia += p.stride_a[d];
      ib += p.stride_b[d];
      if (counter[d] < p.out[d]) break;
      ia -= p.stride_a[d] * counter[d];
      ib -= p.stride_b[d] * counter[d];
      counter[d] = 0;
    }
  }
}

enum class BinaryOp { Add, Sub, Mul };

Tensor binary(const Tensor& a, const Tensor& b, BinaryOp kind, const char* name) {
  auto p = plan(a.shape(), b.shape(), name);
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<double> out(shape_size(p.out));
  for_each(p, av.size(), bv.size(), [&](std::size_t i, std::size_t ia, std::size_t ib) {
    switch (kind) {
      case BinaryOp::Add: out[i] = av[ia] + bv[ib]; break;
      case BinaryOp::Sub: out[i] = av[ia] - bv[ib]; break;
      case BinaryOp::Mul: out[i] = av[ia] * bv[ib]; break;
    }
  });
  auto na = a.node();
  auto nb = b.node();
  return detail::make_result(name, p.out, std::move(out), {a, b}, [na, nb, p, kind](Node& self) {
    const auto& g = self.grad;
    const bool ga = na->requires_grad;
    const bool gb = nb->requires_grad;
    double* da = ga ? na->ensure_grad().data() : nullptr;
    double* db = gb ? nb->ensure_grad().data() : nullptr;
    const auto& av = na->value;
    const auto& bv = nb->value;
    for_each(p, av.size(), bv.size(), [&](std::size_t i, std::size_t ia, std::size_t ib) {
      switch (kind) {
        case BinaryOp::Add:
          if (da) da[ia] += g[i];
          if (db) db[ib] += g[i];
          break;
        case BinaryOp::Sub:
          if (da) da[ia] += g[i];
          if (db) db[ib] -= g[i];
          break;
        case BinaryOp::Mul:
          if (da) da[ia] += g[i] * bv[ib];
          if (db) db[ib] += g[i] * av[ia];
          break;
      }
    });
  });
}

// Unary op from value map f and derivative df(x, y).
template <typename F, typename DF>
Tensor unary(const Tensor& x, const char* name, F f, DF df) {
  const auto xv = x.data();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  auto nx = x.node();
  return detail::make_result(name, x.shape(), std::move(out), {x}, [nx, df](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[i] * df(nx->value[i], self.value[i]);
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary(a, b, BinaryOp::Add, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary(a, b, BinaryOp::Sub, "sub"); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary(a, b, BinaryOp::Mul, "mul"); }

Tensor scale(const Tensor& x, double factor) {
  return unary(x, "scale", [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double value) {
  return unary(x, "add_scalar", [value](double v) { return v + value; }, [](double, double) { return 1.0; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x, "sigmoid",
      [](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return unary(x, "tanh", [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor gelu(const Tensor& x) {
  constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const double inv_sqrt2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary(
      x, "gelu", [](double v) { return 0.5 * v * (1.0 + std::erf(v * inv_sqrt2)); },
      [inv_sqrt2pi](double v, double) {
        return 0.5 * (1.0 + std::erf(v * inv_sqrt2)) + v * inv_sqrt2pi * std::exp(-0.5 * v * v);
      });
}

Tensor square(const Tensor& x) {
  return unary(x, "square", [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor sqrt(const Tensor& x) {
  return unary(x, "sqrt", [](double v) { return std::sqrt(v); }, [](double, double y) { return 0.5 / y; });
}

Tensor abs(const Tensor& x) {
  return unary(
      x, "abs", [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
}

}  // namespace ecto::ad
