#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace convnade {

using Shape = std::vector<std::size_t>;

inline std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ')';
  return os.str();
}

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
};

inline bool& grad_mode() {
  thread_local bool enabled = true;
  return enabled;
}

}  // namespace detail

/// Disables graph recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard() : previous_(detail::grad_mode()) { detail::grad_mode() = false; }
  ~NoGradGuard() { detail::grad_mode() = previous_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Dense row-major array that records the operations applied to it so that
/// gradients can be propagated back from a scalar result.
///
/// Copies share the underlying storage. Leaves created with
/// `requires_grad = true` are parameters; their values may be updated in
/// place between passes.
template <typename T>
class Tensor {
 public:
  using value_type = T;
  using NodePtr = std::shared_ptr<detail::Node<T>>;

  Tensor() = default;

  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false)
      : node_(std::make_shared<detail::Node<T>>()) {
    if (numel(shape) != values.size()) {
      throw ShapeError("tensor: shape " + to_string(shape) + " does not match " +
                       std::to_string(values.size()) + " values");
    }
    node_->shape = std::move(shape);
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    const auto n = numel(shape);
    return Tensor(std::move(shape), std::vector<T>(n, T(0)), requires_grad);
  }

  static Tensor scalar(T v) { return Tensor({1}, {v}); }

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node_->shape; }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const T> values() const { return node_->value; }
  std::span<T> mutable_values() { return node_->value; }
  const std::vector<T>& vec() const { return node_->value; }

  T operator[](std::size_t i) const { return node_->value[i]; }

  T item() const {
    if (size() != 1) throw ShapeError("item: tensor is not a scalar " + to_string(shape()));
    return node_->value[0];
  }

  /// Gradient buffer; empty until a backward pass reaches this tensor.
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  void zero_grad() { node_->grad.assign(node_->value.size(), T(0)); }

  const NodePtr& node() const { return node_; }

 private:
  NodePtr node_;
};

namespace detail {

inline bool any_requires_grad() { return false; }

template <typename T, typename... Rest>
bool any_requires_grad(const Tensor<T>& first, const Rest&... rest) {
  return first.requires_grad() || any_requires_grad(rest...);
}

/// Builds an op result. `backward` receives the output node (with grad
/// filled in) and is only attached when recording is enabled and some input
/// requires a gradient.
template <typename T, typename Fn, typename... Inputs>
Tensor<T> make_result(Shape shape, std::vector<T> values, Fn&& backward, const Inputs&... inputs) {
  Tensor<T> out(std::move(shape), std::move(values));
  if (grad_mode() && any_requires_grad(inputs...)) {
    auto& n = *out.node();
    n.requires_grad = true;
    (n.parents.push_back(inputs.node()), ...);
    n.backward = std::forward<Fn>(backward);
  }
  return out;
}

}  // namespace detail

/// Reverse-mode sweep from a scalar. Gradients are added into every
/// reachable tensor that requires one; parameter buffers accumulate across
/// calls until zeroed.
template <typename T>
void backward(const Tensor<T>& loss) {
  if (loss.size() != 1) throw ShapeError("backward: loss must be a scalar, got " + to_string(loss.shape()));
  if (!loss.requires_grad()) return;

  using NodeT = detail::Node<T>;
  std::vector<NodeT*> order;
  std::unordered_set<NodeT*> seen;
  std::vector<std::pair<NodeT*, std::size_t>> stack{{loss.node().get(), 0}};
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      NodeT* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  NodeT& root = *loss.node();
  root.ensure_grad();
  root.grad[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeT& n = **it;
    if (n.backward && !n.grad.empty()) n.backward(n);
  }
  // release intermediate gradients so repeated passes start clean
  for (NodeT* n : order) {
    if (n->backward) n->grad.clear();
  }
}

using Tensord = Tensor<double>;
using Tensorf = Tensor<float>;

}  // namespace convnade
