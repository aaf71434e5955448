#include <Eigen/Core>
#include <cmath>
#include <limits>

#include "ecto/autodiff/ops.hpp"

namespace ecto::ad {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

auto as_mat(std::vector<double>& v, std::size_t rows, std::size_t cols) {
  return MapMat(v.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

// Eigen picks GEMV or coefficient-wise kernels for thin or tiny products, and
// those peel to the buffer alignment, so the summation order would depend on
// where the allocator placed the operands. Such shapes use a fixed-order loop.
template <class Dst, class A, class B>
void product(Dst&& dst, const A& a, const B& b, bool accumulate) {
  const auto rows = dst.rows(), cols = dst.cols(), depth = a.cols();
  if (rows > 1 && cols > 1 && rows + cols + depth >= 20) {
    if (accumulate) {
      dst.noalias() += a * b;
    } else {
      dst.noalias() = a * b;
    }
    return;
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < depth; ++k) s += a(i, k) * b(k, j);
      dst(i, j) = accumulate ? dst(i, j) + s : s;
    }
  }
}

void add_bias(double* y, const double* bias, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) y[r * cols + c] += bias[c];
}

void accumulate_bias_grad(double* db, const double* dy, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) db[c] += dy[r * cols + c];
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  if (weight.rank() != 2) throw DimensionError("linear: weight must be [out, in], got " + shape_str(weight.shape()));
  const std::size_t out_dim = weight.dim(0);
  const std::size_t in_dim = weight.dim(1);
  if (x.rank() == 0 || x.dim(-1) != in_dim) {
    throw DimensionError("linear: input " + shape_str(x.shape()) + " incompatible with weight " +
                         shape_str(weight.shape()));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != out_dim)) {
    throw DimensionError("linear: bias " + shape_str(bias.shape()) + " does not match out=" + std::to_string(out_dim));
  }
  const std::size_t rows = x.size() / in_dim;
  Shape out_shape = x.shape();
  out_shape.back() = out_dim;

  auto nx = x.node();
  auto nw = weight.node();
  auto nb = bias.defined() ? bias.node() : NodePtr{};

  std::vector<double> out(rows * out_dim);
  product(as_mat(out, rows, out_dim), as_mat(nx->value, rows, in_dim), as_mat(nw->value, out_dim, in_dim).transpose(),
          false);
  if (nb) add_bias(out.data(), nb->value.data(), rows, out_dim);

  return detail::make_result("linear", std::move(out_shape), std::move(out), {x, weight, bias},
                             [nx, nw, nb, rows, in_dim, out_dim](Node& self) {
                               const auto dy = as_mat(self.grad, rows, out_dim);
                               if (nx->requires_grad) {
                                 product(as_mat(nx->ensure_grad(), rows, in_dim), dy,
                                         as_mat(nw->value, out_dim, in_dim), true);
                               }
                               if (nw->requires_grad) {
                                 product(as_mat(nw->ensure_grad(), out_dim, in_dim), dy.transpose(),
                                         as_mat(nx->value, rows, in_dim), true);
                               }
                               if (nb && nb->requires_grad) {
                                 accumulate_bias_grad(nb->ensure_grad().data(), self.grad.data(), rows, out_dim);
                               }
                             });
}

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride, std::size_t padding) {
  if (stride == 0) throw DimensionError("conv1d: stride must be >= 1");
  if (length + 2 * padding < kernel) {
    throw DimensionError("conv1d: kernel width " + std::to_string(kernel) + " exceeds padded input length " +
                         std::to_string(length + 2 * padding));
  }
  return (length + 2 * padding - kernel) / stride + 1;
}

Tensor conv1d(const Tensor& x, const Tensor& kernels, const Tensor& bias, std::size_t stride, std::size_t padding,
              PaddingMode mode) {
  if (kernels.rank() != 3) throw DimensionError("conv1d: kernels must be [C_out, C_in, k]");
  const bool batched = x.rank() == 3;
  if (!batched && x.rank() != 2) throw DimensionError("conv1d: input must be [C_in, L] or [B, C_in, L]");
  const std::size_t batch = batched ? x.dim(0) : 1;
  const std::size_t c_in = x.dim(-2);
  const std::size_t length = x.dim(-1);
  const std::size_t c_out = kernels.dim(0);
  const std::size_t width = kernels.dim(2);
  if (kernels.dim(1) != c_in) {
    throw DimensionError("conv1d: input channels " + std::to_string(c_in) + " vs kernel channels " +
                         std::to_string(kernels.dim(1)));
  }
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != c_out)) throw DimensionError("conv1d: bias must be [C_out]");
  const std::size_t l_out = conv1d_output_length(length, width, stride, padding);
  const std::size_t patch = c_in * width;
  const bool replicate = mode == PaddingMode::Replicate;
  // Source column for an (unpadded) position, or -1 for a zero pad.
  auto source = [=](std::ptrdiff_t pos) -> std::ptrdiff_t {
    const auto len = static_cast<std::ptrdiff_t>(length);
    if (pos >= 0 && pos < len) return pos;
    if (!replicate) return -1;
    return pos < 0 ? 0 : len - 1;
  };

  // im2col: cols[b*l_out + t, ci*width + j] = x[b, ci, t*stride + j - padding]
  auto build_cols = [=](const std::vector<double>& xv) {
    std::vector<double> cols(batch * l_out * patch, 0.0);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t t = 0; t < l_out; ++t) {
        double* row = cols.data() + (b * l_out + t) * patch;
        for (std::size_t ci = 0; ci < c_in; ++ci) {
          const double* src = xv.data() + (b * c_in + ci) * length;
          for (std::size_t j = 0; j < width; ++j) {
            const auto pos = source(static_cast<std::ptrdiff_t>(t * stride + j) - static_cast<std::ptrdiff_t>(padding));
            if (pos >= 0) row[ci * width + j] = src[pos];
          }
        }
      }
    }
    return cols;
  };

  auto nx = x.node();
  auto nk = kernels.node();
  auto nb = bias.defined() ? bias.node() : NodePtr{};

  auto cols = std::make_shared<std::vector<double>>(build_cols(nx->value));
  std::vector<double> flat(batch * l_out * c_out);
  product(as_mat(flat, batch * l_out, c_out), as_mat(*cols, batch * l_out, patch),
          as_mat(nk->value, c_out, patch).transpose(), false);
  if (nb) add_bias(flat.data(), nb->value.data(), batch * l_out, c_out);

  std::vector<double> out(batch * c_out * l_out);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < l_out; ++t)
      for (std::size_t co = 0; co < c_out; ++co) out[(b * c_out + co) * l_out + t] = flat[(b * l_out + t) * c_out + co];

  Shape out_shape = batched ? Shape{batch, c_out, l_out} : Shape{c_out, l_out};
  return detail::make_result(
      "conv1d", std::move(out_shape), std::move(out), {x, kernels, bias},
      [=](Node& self) {
        std::vector<double> dflat(batch * l_out * c_out);
        for (std::size_t b = 0; b < batch; ++b)
          for (std::size_t t = 0; t < l_out; ++t)
            for (std::size_t co = 0; co < c_out; ++co)
              dflat[(b * l_out + t) * c_out + co] = self.grad[(b * c_out + co) * l_out + t];
        const auto dy = as_mat(dflat, batch * l_out, c_out);
        if (nk->requires_grad) {
          product(as_mat(nk->ensure_grad(), c_out, patch), dy.transpose(), as_mat(*cols, batch * l_out, patch), true);
        }
        if (nb && nb->requires_grad) {
          accumulate_bias_grad(nb->ensure_grad().data(), dflat.data(), batch * l_out, c_out);
        }
        if (nx->requires_grad) {
          std::vector<double> dcols(batch * l_out * patch);
          product(as_mat(dcols, batch * l_out, patch), dy, as_mat(nk->value, c_out, patch), false);
          auto& dx = nx->ensure_grad();
          for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t t = 0; t < l_out; ++t) {
              const double* row = dcols.data() + (b * l_out + t) * patch;
              for (std::size_t ci = 0; ci < c_in; ++ci) {
                double* dst = dx.data() + (b * c_in + ci) * length;
                for (std::size_t j = 0; j < width; ++j) {
                  const auto pos =
                      source(static_cast<std::ptrdiff_t>(t * stride + j) - static_cast<std::ptrdiff_t>(padding));
                  if (pos >= 0) dst[pos] += row[ci * width + j];
                }
              }
            }
          }
        }
      });
}

Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t n_heads) {
  if (q.rank() != 3 || k.rank() != 3 || v.rank() != 3) throw DimensionError("attention: Q, K, V must be [B, N, d]");
  const std::size_t batch = q.dim(0);
  const std::size_t nq = q.dim(1);
  const std::size_t nk = k.dim(1);
  const std::size_t d = q.dim(2);
  if (k.dim(0) != batch || v.dim(0) != batch || k.dim(2) != d || v.dim(2) != d || v.dim(1) != nk) {
    throw DimensionError("attention: incompatible shapes Q" + shape_str(q.shape()) + " K" + shape_str(k.shape()) +
                         " V" + shape_str(v.shape()));
  }
  if (n_heads == 0 || d % n_heads != 0) {
    throw std::invalid_argument("attention: model width " + std::to_string(d) + " not divisible by " +
                                std::to_string(n_heads) + " heads");
  }
  const std::size_t dk = d / n_heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dk));

  auto nq_node = q.node();
  auto nk_node = k.node();
  auto nv_node = v.node();
  // probs[b][h][i][j]
  auto probs = std::make_shared<std::vector<double>>(batch * n_heads * nq * nk);
  std::vector<double> out(batch * nq * d, 0.0);
  const auto& qv = nq_node->value;
  const auto& kv = nk_node->value;
  const auto& vv = nv_node->value;
  std::vector<double> scores(nk);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < n_heads; ++h) {
      for (std::size_t i = 0; i < nq; ++i) {
        const double* qi = qv.data() + (b * nq + i) * d + h * dk;
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nk; ++j) {
          const double* kj = kv.data() + (b * nk + j) * d + h * dk;
          double s = 0.0;
          for (std::size_t c = 0; c < dk; ++c) s += qi[c] * kj[c];
          scores[j] = s * inv_scale;
          mx = std::max(mx, scores[j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < nk; ++j) {
          scores[j] = std::exp(scores[j] - mx);
          z += scores[j];
        }
        double* p = probs->data() + ((b * n_heads + h) * nq + i) * nk;
        double* oi = out.data() + (b * nq + i) * d + h * dk;
        for (std::size_t j = 0; j < nk; ++j) {
          p[j] = scores[j] / z;
          const double* vj = vv.data() + (b * nk + j) * d + h * dk;
          for (std::size_t c = 0; c < dk; ++c) oi[c] += p[j] * vj[c];
        }
      }
    }
  }

  return detail::make_result(
      "attention", {batch, nq, d}, std::move(out), {q, k, v},
      [=](Node& self) {
        const auto& qv = nq_node->value;
        const auto& kv = nk_node->value;
        const auto& vv = nv_node->value;
        std::vector<double>* dq = nq_node->requires_grad ? &nq_node->ensure_grad() : nullptr;
        std::vector<double>* dkk = nk_node->requires_grad ? &nk_node->ensure_grad() : nullptr;
        std::vector<double>* dv = nv_node->requires_grad ? &nv_node->ensure_grad() : nullptr;
        std::vector<double> dp(nk), ds(nk);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t h = 0; h < n_heads; ++h) {
            for (std::size_t i = 0; i < nq; ++i) {
              const double* go = self.grad.data() + (b * nq + i) * d + h * dk;
              const double* p = probs->data() + ((b * n_heads + h) * nq + i) * nk;
              double dot = 0.0;
              for (std::size_t j = 0; j < nk; ++j) {
                const double* vj = vv.data() + (b * nk + j) * d + h * dk;
                double s = 0.0;
                for (std::size_t c = 0; c < dk; ++c) s += go[c] * vj[c];
                dp[j] = s;
                dot += s * p[j];
                if (dv) {
                  double* dvj = dv->data() + (b * nk + j) * d + h * dk;
                  for (std::size_t c = 0; c < dk; ++c) dvj[c] += p[j] * go[c];
                }
              }
              for (std::size_t j = 0; j < nk; ++j) ds[j] = p[j] * (dp[j] - dot) * inv_scale;
              const double* qi = qv.data() + (b * nq + i) * d + h * dk;
              for (std::size_t j = 0; j < nk; ++j) {
                const double* kj = kv.data() + (b * nk + j) * d + h * dk;
                if (dq) {
                  double* dqi = dq->data() + (b * nq + i) * d + h * dk;
                  for (std::size_t c = 0; c < dk; ++c) dqi[c] += ds[j] * kj[c];
                }
                if (dkk) {
                  double* dkj = dkk->data() + (b * nk + j) * d + h * dk;
                  for (std::size_t c = 0; c < dk; ++c) dkj[c] += ds[j] * qi[c];
                }
              }
            }
          }
        }
      });
}

Tensor left_matmul_const(std::span<const double> a, std::size_t rows, const Tensor& x) {
  if (x.rank() != 3) throw DimensionError("left_matmul_const: x must be [B, K, F]");
  const std::size_t batch = x.dim(0);
  const std::size_t inner = x.dim(1);
  const std::size_t feat = x.dim(2);
  if (a.size() != rows * inner) throw DimensionError("left_matmul_const: matrix does not match x");
  auto mat = std::make_shared<std::vector<double>>(a.begin(), a.end());
  auto nx = x.node();
  std::vector<double> out(batch * rows * feat);
  for (std::size_t b = 0; b < batch; ++b) {
    auto ob = MapMat(out.data() + b * rows * feat, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(feat));
    auto xb = ConstMapMat(nx->value.data() + b * inner * feat, static_cast<Eigen::Index>(inner),
                          static_cast<Eigen::Index>(feat));
    product(ob, as_mat(*mat, rows, inner), xb, false);
  }
  return detail::make_result("left_matmul_const", {batch, rows, feat}, std::move(out), {x},
                             [=](Node& self) {
                               auto& dx = nx->ensure_grad();
                               for (std::size_t b = 0; b < batch; ++b) {
                                 auto gb = ConstMapMat(self.grad.data() + b * rows * feat,
                                                       static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(feat));
                                 auto db = MapMat(dx.data() + b * inner * feat, static_cast<Eigen::Index>(inner),
                                                  static_cast<Eigen::Index>(feat));
                                 product(db, as_mat(*mat, rows, inner).transpose(), gb, true);
                               }
                             });
}

}  // namespace ecto::ad
