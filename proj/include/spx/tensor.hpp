#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spx::nn {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // sized on first use
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents' grads.
  std::function<void(Node&)> backward;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
};

}  // namespace detail

// Handle to a node in the autodiff graph. Copies share the node.
template <typename T>
class Tensor {
public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<T> values, bool requires_grad = false);
  static Tensor scalar(T value);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const T> values() const { return node_->value; }
  // Direct write access; for optimizers, initializers and loaders only.
  std::span<T> mutable_values() { return node_->value; }

  // Empty until a backward pass reaches this tensor.
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  void zero_grad() {
    if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), T(0));
  }

  T item() const;
  // Same values, no graph history.
  Tensor detach() const;

  const std::shared_ptr<detail::Node<T>>& node() const noexcept { return node_; }
  static Tensor wrap(std::shared_ptr<detail::Node<T>> node) {
    Tensor t;
    t.node_ = std::move(node);
    return t;
  }

private:
  std::shared_ptr<detail::Node<T>> node_;
};

// Elementwise.
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T> Tensor<T> add_scalar(const Tensor<T>& a, T offset);
template <typename T> Tensor<T> leaky_relu(const Tensor<T>& x, T slope);
template <typename T> Tensor<T> relu(const Tensor<T>& x);
template <typename T> Tensor<T> sigmoid(const Tensor<T>& x);

// Zeroes each unit with probability p and rescales survivors by 1 / (1 - p)
// in training mode; identity otherwise.
template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double p, bool training, std::uint64_t seed);

// Reductions to a single-element tensor.
template <typename T> Tensor<T> sum(const Tensor<T>& x);
template <typename T> Tensor<T> mean(const Tensor<T>& x);

// NCHW cross-correlation. kernels: [out, in, k, k]; bias: [out] or undefined.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernels, const Tensor<T>& bias,
                 int stride, int padding);

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, int factor_y, int factor_x);
template <typename T> Tensor<T> upsample_nearest(const Tensor<T>& x, int factor) {
  return upsample_nearest(x, factor, factor);
}

// Concatenate NCHW tensors along the channel axis.
template <typename T> Tensor<T> concat_channels(const Tensor<T>& a, const Tensor<T>& b);

// Mean of squared differences over every element.
template <typename T> Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b);

inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

// Structural similarity from global image statistics (population variance and
// covariance). Rank-4 inputs are treated as a batch: SSIM is computed per
// sample over C x H x W and averaged. Other ranks form a single sample.
template <typename T> Tensor<T> ssim(const Tensor<T>& u, const Tensor<T>& v);

// Plain-value SSIM over one sample, shared by the op and the metrics module.
double ssim_value(std::span<const double> u, std::span<const double> v);

// Accumulates d(loss)/d(leaf) into every reachable leaf that requires a
// gradient. Leaf gradients add up across calls; intermediate ones are reset.
template <typename T> void backward(const Tensor<T>& loss);

}  // namespace spx::nn
