#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hamenc/data.hpp"
#include "hamenc/tensor.hpp"

namespace hamenc {

/// Valid cross-correlation output, [N x K x W] with W = L - k + 1.
struct ConvOutput {
  Tensor3 values;

  std::size_t windows() const noexcept { return values.dim2(); }
};

/// Global max over windows, [N x K], with the first-occurrence argmax window.
struct PoolOutput {
  Matrix values;
  std::vector<std::size_t> argmax;  // row-major [N x K]
  std::size_t windows = 0;

  std::size_t argmax_at(std::size_t n, std::size_t c) const { return argmax[n * values.cols() + c]; }
};

/// values[n,c,j] = sum_{i,r} kernels[c,i,r] * input[n,i,j+r]. No activation.
/// Each window sum runs over r in increasing order, so the result does not
/// depend on `threads`.
ConvOutput conv1d_valid(const OneHotBatch& input, const Tensor3& kernels, unsigned threads = 1);

PoolOutput global_max_pool(const ConvOutput& conv);

/// logits = pooled * weights^T, no bias. pooled is [N x K], weights [d x K].
Matrix dense_forward(const Matrix& pooled, const Matrix& weights);

struct LossResult {
  double loss = 0.0;
  Matrix dlogits;
};

/// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);

/// Mean negative log-likelihood of the true class and its gradient,
/// (softmax - onehot) / N.
LossResult softmax_cross_entropy(const Matrix& logits, std::span<const int> labels);

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-5;
};

/// Moment buffers for one parameter tensor.
class AdamState {
 public:
  AdamState(std::size_t parameter_count, AdamConfig config);

  const AdamConfig& config() const noexcept { return config_; }
  std::uint64_t step() const noexcept { return step_; }
  std::span<const double> first_moment() const noexcept { return m_; }
  std::span<const double> second_moment() const noexcept { return v_; }

 private:
  friend void adam_step(std::span<double>, std::span<const double>, AdamState&);

  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t step_ = 0;
};

/// Bias-corrected Adam. Weight decay is added to the gradient (L2 style)
/// before the moment update.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

/// Routes dpooled[n,c] to the argmax window of (n,c); every other window gets 0.
ConvOutput pool_backward(const PoolOutput& pool, const Matrix& dpooled);

/// dL/dkernels for the routed gradient: for each (n,c) the one-hot window at
/// the argmax, scaled by dpooled[n,c]. Samples are reduced in index order.
Tensor3 conv_backward_weights(const OneHotBatch& input, const PoolOutput& pool, const Matrix& dpooled,
                              std::size_t kmer_length, unsigned threads = 1);

struct Gradients {
  Matrix dense;  // [d x K]
  Tensor3 conv;  // [K x m x k], with respect to the binarized kernels
};

/// Hand-derived backward pass for conv -> global max pool -> dense.
Gradients backward_pass(const OneHotBatch& input, const PoolOutput& pool, const Matrix& dense_weights,
                        const Matrix& dlogits, std::size_t kmer_length, unsigned threads = 1);

}  // namespace hamenc
