#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "ecto/autodiff/tensor.hpp"

namespace ecto::ad {

// Elementwise arithmetic with trailing-dimension broadcasting (size-1 axes or
// missing leading axes broadcast).
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double value);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
/// Exact (erf) GELU.
Tensor gelu(const Tensor& x);
Tensor square(const Tensor& x);
Tensor abs(const Tensor& x);
/// Negative inputs produce NaN and therefore a NumericError.
Tensor sqrt(const Tensor& x);

/// y = x Wᵀ + b over the trailing axis. x: [..., in], W: [out, in], b: [out]
/// or undefined for a bias-free projection.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

enum class PaddingMode { Zero, Replicate };

/// 1-D convolution with symmetric padding (zeros, or copies of the edge
/// values). x: [C_in, L] or [B, C_in, L]; kernels: [C_out, C_in, k]; bias:
/// [C_out] or undefined. Output length is floor((L + 2·padding − k)/stride) + 1.
Tensor conv1d(const Tensor& x, const Tensor& kernels, const Tensor& bias, std::size_t stride,
              std::size_t padding, PaddingMode mode = PaddingMode::Zero);
std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride, std::size_t padding);

/// Softmax of x/temperature along the last axis.
Tensor softmax(const Tensor& x, double temperature = 1.0);

/// Euclidean projection of x/temperature onto the probability simplex along
/// the last axis. Entries outside the support are exactly zero.
Tensor sparsemax(const Tensor& x, double temperature = 1.0);

/// Within-group softmax of x/temperature along the last axis followed by a
/// top-k mask renormalized over the survivors. Groups smaller than or equal
/// to k (or k == 0) keep all members. Ties keep the lower index.
Tensor group_topk_softmax(const Tensor& x, const std::vector<std::vector<std::size_t>>& groups, std::size_t k,
                          double temperature = 1.0);

/// Layer normalization over the last axis followed by the affine transform.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

/// Inverted dropout. Identity when `training` is false or rate == 0.
Tensor dropout(const Tensor& x, double rate, bool training, std::mt19937_64& rng);

/// Multi-head scaled dot-product attention without projections.
/// Q: [B, Nq, d], K and V: [B, Nk, d]. Heads split d evenly.
Tensor scaled_dot_attention(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t n_heads);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor sum_axis(const Tensor& x, int axis);
Tensor mean_axis(const Tensor& x, int axis);
Tensor max_axis(const Tensor& x, int axis);
Tensor min_axis(const Tensor& x, int axis);

Tensor reshape(const Tensor& x, Shape shape);
/// Swaps the last two axes.
Tensor transpose_last(const Tensor& x);
Tensor concat_last(const std::vector<Tensor>& parts);
/// x[..., start:start+length].
Tensor slice_last(const Tensor& x, std::size_t start, std::size_t length);
/// Gathers along the last axis: out[..., j] = x[..., index[j]].
Tensor gather_last(const Tensor& x, std::span<const std::size_t> index);
/// out[b] = A · x[b] for a constant matrix A: [M, K] and x: [B, K, F].
Tensor left_matmul_const(std::span<const double> a, std::size_t rows, const Tensor& x);

}  // namespace ecto::ad
