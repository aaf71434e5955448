#include <algorithm>
#include <numeric>

#include "ecto/autodiff/ops.hpp"

namespace ecto::ad {

namespace {

std::size_t normalize_axis(const Tensor& x, int axis) {
  const int r = static_cast<int>(x.rank());
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) throw DimensionError("axis " + std::to_string(axis) + " out of range for " + shape_str(x.shape()));
  return static_cast<std::size_t>(a);
}

// Splits a shape around `axis` into (outer, extent, inner) element counts.
struct AxisSplit {
  std::size_t outer, extent, inner;
};

AxisSplit split(const Tensor& x, std::size_t axis) {
  const auto& s = x.shape();
  AxisSplit out{1, s[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) out.outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) out.inner *= s[i];
  return out;
}

Shape drop_axis(const Shape& s, std::size_t axis) {
  Shape out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != axis) out.push_back(s[i]);
  }
  if (out.empty()) out.push_back(1);
  return out;
}

enum class Extreme { Max, Min };

Tensor extreme_axis(const Tensor& x, int axis_in, Extreme which, const char* name) {
  const std::size_t axis = normalize_axis(x, axis_in);
  const auto sp = split(x, axis);
  if (sp.extent == 0) throw DimensionError(std::string(name) + ": empty axis");
  const auto xv = x.data();
  std::vector<double> out(sp.outer * sp.inner);
  auto arg = std::make_shared<std::vector<std::size_t>>(out.size());
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t i = 0; i < sp.inner; ++i) {
      std::size_t best = o * sp.extent * sp.inner + i;
      for (std::size_t e = 1; e < sp.extent; ++e) {
        const std::size_t idx = (o * sp.extent + e) * sp.inner + i;
        const bool better = which == Extreme::Max ? xv[idx] > xv[best] : xv[idx] < xv[best];
        if (better) best = idx;
      }
      out[o * sp.inner + i] = xv[best];
      (*arg)[o * sp.inner + i] = best;
    }
  }
  auto nx = x.node();
  return detail::make_result(name, drop_axis(x.shape(), axis), std::move(out), {x}, [nx, arg](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t j = 0; j < arg->size(); ++j) dx[(*arg)[j]] += self.grad[j];
  });
}

}  // namespace

Tensor sum(const Tensor& x) {
  const auto xv = x.data();
  const double total = std::accumulate(xv.begin(), xv.end(), 0.0);
  auto nx = x.node();
  return detail::make_result("sum", {1}, {total}, {x}, [nx](Node& self) {
    auto& dx = nx->ensure_grad();
    for (auto& d : dx) d += self.grad[0];
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.size())); }

Tensor sum_axis(const Tensor& x, int axis_in) {
  const std::size_t axis = normalize_axis(x, axis_in);
  const auto sp = split(x, axis);
  const auto xv = x.data();
  std::vector<double> out(sp.outer * sp.inner, 0.0);
  for (std::size_t o = 0; o < sp.outer; ++o)
    for (std::size_t e = 0; e < sp.extent; ++e)
      for (std::size_t i = 0; i < sp.inner; ++i) out[o * sp.inner + i] += xv[(o * sp.extent + e) * sp.inner + i];
  auto nx = x.node();
  return detail::make_result("sum_axis", drop_axis(x.shape(), axis), std::move(out), {x}, [nx, sp](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t o = 0; o < sp.outer; ++o)
      for (std::size_t e = 0; e < sp.extent; ++e)
        for (std::size_t i = 0; i < sp.inner; ++i) dx[(o * sp.extent + e) * sp.inner + i] += self.grad[o * sp.inner + i];
  });
}

Tensor mean_axis(const Tensor& x, int axis) {
  const std::size_t extent = x.dim(axis);
  if (extent == 0) throw DimensionError("mean_axis: empty axis");
  return scale(sum_axis(x, axis), 1.0 / static_cast<double>(extent));
}

Tensor max_axis(const Tensor& x, int axis) { return extreme_axis(x, axis, Extreme::Max, "max_axis"); }
Tensor min_axis(const Tensor& x, int axis) { return extreme_axis(x, axis, Extreme::Min, "min_axis"); }

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw DimensionError("reshape: " + shape_str(x.shape()) + " -> " + shape_str(shape) + " changes element count");
  }
  auto nx = x.node();
  std::vector<double> out(x.data().begin(), x.data().end());
  return detail::make_result("reshape", std::move(shape), std::move(out), {x}, [nx](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += self.grad[i];
  });
}

Tensor transpose_last(const Tensor& x) {
  if (x.rank() < 2) throw DimensionError("transpose_last: rank must be >= 2");
  const std::size_t rows = x.dim(-2);
  const std::size_t cols = x.dim(-1);
  const std::size_t batch = x.size() / (rows * cols);
  const auto xv = x.data();
  std::vector<double> out(x.size());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) out[(b * cols + c) * rows + r] = xv[(b * rows + r) * cols + c];
  Shape shape = x.shape();
  std::swap(shape[shape.size() - 1], shape[shape.size() - 2]);
  auto nx = x.node();
  return detail::make_result("transpose_last", std::move(shape), std::move(out), {x}, [=](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) dx[(b * rows + r) * cols + c] += self.grad[(b * cols + c) * rows + r];
  });
}

Tensor concat_last(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_last: no inputs");
  const Shape& first = parts.front().shape();
  const std::size_t rows = parts.front().size() / parts.front().dim(-1);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.rank() != first.size() || !std::equal(first.begin(), first.end() - 1, p.shape().begin())) {
      throw DimensionError("concat_last: leading shapes differ: " + shape_str(first) + " vs " + shape_str(p.shape()));
    }
    widths.push_back(p.dim(-1));
    total += p.dim(-1);
  }
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto v = parts[k].data();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(v.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    offset += widths[k];
  }
  Shape shape = first;
  shape.back() = total;
  std::vector<NodePtr> nodes;
  for (const auto& p : parts) nodes.push_back(p.node());
  return detail::make_result("concat_last", std::move(shape), std::move(out), parts, [=](Node& self) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k]->requires_grad) {
        auto& d = nodes[k]->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t j = 0; j < widths[k]; ++j) d[r * widths[k] + j] += self.grad[r * total + off + j];
      }
      off += widths[k];
    }
  });
}

Tensor slice_last(const Tensor& x, std::size_t start, std::size_t length) {
  const std::size_t n = x.dim(-1);
  if (start + length > n || length == 0) {
    throw DimensionError("slice_last: [" + std::to_string(start) + ", " + std::to_string(start + length) +
                         ") outside last axis of " + shape_str(x.shape()));
  }
  const std::size_t rows = x.size() / n;
  const auto xv = x.data();
  std::vector<double> out(rows * length);
  for (std::size_t r = 0; r < rows; ++r) std::copy_n(xv.data() + r * n + start, length, out.data() + r * length);
  Shape shape = x.shape();
  shape.back() = length;
  auto nx = x.node();
  return detail::make_result("slice_last", std::move(shape), std::move(out), {x}, [=](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < length; ++j) dx[r * n + start + j] += self.grad[r * length + j];
  });
}

Tensor gather_last(const Tensor& x, std::span<const std::size_t> index) {
  const std::size_t n = x.dim(-1);
  for (auto i : index) {
    if (i >= n) throw DimensionError("gather_last: index out of range");
  }
  const std::size_t rows = x.size() / n;
  const std::size_t m = index.size();
  auto idx = std::make_shared<std::vector<std::size_t>>(index.begin(), index.end());
  const auto xv = x.data();
  std::vector<double> out(rows * m);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < m; ++j) out[r * m + j] = xv[r * n + (*idx)[j]];
  Shape shape = x.shape();
  shape.back() = m;
  auto nx = x.node();
  return detail::make_result("gather_last", std::move(shape), std::move(out), {x}, [=](Node& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < m; ++j) dx[r * n + (*idx)[j]] += self.grad[r * m + j];
  });
}

}  // namespace ecto::ad
