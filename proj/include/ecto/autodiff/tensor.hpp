#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecto::ad {

using Shape = std::vector<std::size_t>;

/// Raised when operand shapes are incompatible with an operation.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a forward or backward pass produces NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t shape_size(const Shape& shape);
std::string shape_str(const Shape& shape);

struct Node;
using NodePtr = std::shared_ptr<Node>;

/// Graph node: value buffer, lazily allocated gradient and the closure that
/// propagates this node's gradient into its parents.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<NodePtr> parents;
  std::function<void(Node&)> backward_fn;

  std::vector<double>& ensure_grad();
};

/// Dense row-major float64 array with reverse-mode differentiation.
///
/// A Tensor is a cheap handle; copies share the same node. Values are
/// treated as immutable once an op has consumed them.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  /// Size of dimension `axis`; negative values count from the back.
  std::size_t dim(int axis) const;
  std::size_t size() const;

  std::span<const double> data() const;
  /// Writable view for leaves (parameters, inputs). Do not use on op outputs
  /// that are still part of a live graph.
  std::span<double> mutable_data();
  std::span<const double> grad() const;
  bool has_grad() const;
  bool requires_grad() const;
  void set_requires_grad(bool flag);

  double item() const;
  double at(std::initializer_list<std::size_t> index) const;

  /// Seeds d(this)/d(this) = 1 and back-propagates through the graph.
  /// Requires a single-element tensor.
  void backward() const;
  void zero_grad() const;
  /// Fresh leaf holding a copy of the values, disconnected from the graph.
  Tensor detach() const;

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

/// Disables graph recording for the lifetime of the guard.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

namespace detail {

using BackwardFn = std::function<void(Node&)>;

/// Builds an op output. Values are checked for finiteness; the backward
/// closure is only retained when some parent requires a gradient.
Tensor make_result(const char* op, Shape shape, std::vector<double> value,
                   std::vector<Tensor> parents, BackwardFn backward);

void check_finite(const char* where, std::span<const double> values);

}  // namespace detail

}  // namespace ecto::ad
