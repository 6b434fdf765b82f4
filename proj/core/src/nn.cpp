#include "hamenc/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hamenc/error.hpp"
#include "parallel.hpp"

namespace hamenc {
namespace {

std::string dims(std::size_t a, std::size_t b) { return std::to_string(a) + "x" + std::to_string(b); }

}  // namespace

ConvOutput conv1d_valid(const OneHotBatch& input, const Tensor3& kernels, unsigned threads) {
  const std::size_t n_samples = input.batch_size();
  const std::size_t n_kernels = kernels.dim0();
  const std::size_t m = kernels.dim1();
  const std::size_t k = kernels.dim2();
  if (m != input.alphabet_size()) {
    throw ShapeError("kernel rows (" + std::to_string(m) + ") differ from alphabet size (" +
                     std::to_string(input.alphabet_size()) + ")");
  }
  if (k == 0) throw ShapeError("kernel width must be positive");
  if (input.width() < k) {
    throw ShapeError("padded width " + std::to_string(input.width()) + " is shorter than kernel width " +
                     std::to_string(k));
  }
  const std::size_t windows = input.width() - k + 1;
  ConvOutput out{Tensor3(n_samples, n_kernels, windows)};

  // The input has at most one active row per column, so only that row
  // contributes to each tap; the remaining products are exact zeros.
  detail::parallel_for(n_samples * n_kernels, threads, [&](std::size_t task) {
    const std::size_t n = task / n_kernels;
    const std::size_t c = task % n_kernels;
    for (std::size_t j = 0; j < windows; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < k; ++r) {
        const Item item = input.item_at(n, j + r);
        if (item >= 0) acc += kernels(c, static_cast<std::size_t>(item), r);
      }
      out.values(n, c, j) = acc;
    }
  });
  return out;
}

PoolOutput global_max_pool(const ConvOutput& conv) {
  const auto& v = conv.values;
  if (v.dim2() == 0) throw ShapeError("global max pool needs at least one window");
  PoolOutput out;
  out.values = Matrix(v.dim0(), v.dim1());
  out.argmax.assign(v.dim0() * v.dim1(), 0);
  out.windows = v.dim2();
  for (std::size_t n = 0; n < v.dim0(); ++n) {
    for (std::size_t c = 0; c < v.dim1(); ++c) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < v.dim2(); ++j) {
        if (v(n, c, j) > v(n, c, best)) best = j;
      }
      out.values(n, c) = v(n, c, best);
      out.argmax[n * v.dim1() + c] = best;
    }
  }
  return out;
}

Matrix dense_forward(const Matrix& pooled, const Matrix& weights) {
  if (pooled.cols() != weights.cols()) {
    throw ShapeError("dense layer: pooled " + dims(pooled.rows(), pooled.cols()) + " vs weights " +
                     dims(weights.rows(), weights.cols()));
  }
  Matrix logits(pooled.rows(), weights.rows());
  for (std::size_t n = 0; n < pooled.rows(); ++n) {
    for (std::size_t o = 0; o < weights.rows(); ++o) {
      double acc = 0.0;
      for (std::size_t c = 0; c < pooled.cols(); ++c) acc += pooled(n, c) * weights(o, c);
      logits(n, o) = acc;
    }
  }
  return logits;
}

Matrix softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    auto row = logits.row(n);
    double mx = row[0];
    for (double x : row) mx = std::max(mx, x);
    double z = 0.0;
    for (std::size_t o = 0; o < row.size(); ++o) z += (p(n, o) = std::exp(row[o] - mx));
    for (std::size_t o = 0; o < row.size(); ++o) p(n, o) /= z;
  }
  return p;
}

LossResult softmax_cross_entropy(const Matrix& logits, std::span<const int> labels) {
  const std::size_t n_samples = logits.rows();
  const std::size_t d = logits.cols();
  if (labels.size() != n_samples) {
    throw ShapeError("loss: " + std::to_string(labels.size()) + " labels for " + std::to_string(n_samples) +
                     " rows of logits");
  }
  LossResult out{0.0, Matrix(n_samples, d)};
  if (n_samples == 0) return out;
  if (d == 0) throw ShapeError("loss: logits have no classes");
  for (double x : logits.values()) {
    if (!std::isfinite(x)) throw NumericError("loss: non-finite logit");
  }

  const double inv_n = 1.0 / static_cast<double>(n_samples);
  double total = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const int label = labels[n];
    if (label < 0 || static_cast<std::size_t>(label) >= d) {
      throw ValidationError("loss: label " + std::to_string(label) + " outside [0, " + std::to_string(d) + ")");
    }
    auto row = logits.row(n);
    double mx = row[0];
    for (double x : row) mx = std::max(mx, x);
    double z = 0.0;
    for (double x : row) z += std::exp(x - mx);
    total += std::log(z) - (row[label] - mx);
    for (std::size_t o = 0; o < d; ++o) {
      const double p = std::exp(row[o] - mx) / z;
      out.dlogits(n, o) = (p - (static_cast<int>(o) == label ? 1.0 : 0.0)) * inv_n;
    }
  }
  out.loss = total * inv_n;
  return out;
}

AdamState::AdamState(std::size_t parameter_count, AdamConfig config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m_.size()) {
    throw ShapeError("adam: " + std::to_string(params.size()) + " params, " + std::to_string(grads.size()) +
                     " grads, " + std::to_string(state.m_.size()) + " moments");
  }
  const auto& cfg = state.config_;
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i] + cfg.weight_decay * params[i];
    state.m_[i] = cfg.beta1 * state.m_[i] + (1.0 - cfg.beta1) * g;
    state.v_[i] = cfg.beta2 * state.v_[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = state.m_[i] / bias1;
    const double v_hat = state.v_[i] / bias2;
    params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

ConvOutput pool_backward(const PoolOutput& pool, const Matrix& dpooled) {
  if (dpooled.rows() != pool.values.rows() || dpooled.cols() != pool.values.cols()) {
    throw ShapeError("pool backward: gradient " + dims(dpooled.rows(), dpooled.cols()) + " vs pool " +
                     dims(pool.values.rows(), pool.values.cols()));
  }
  ConvOutput out{Tensor3(dpooled.rows(), dpooled.cols(), pool.windows)};
  for (std::size_t n = 0; n < dpooled.rows(); ++n) {
    for (std::size_t c = 0; c < dpooled.cols(); ++c) out.values(n, c, pool.argmax_at(n, c)) = dpooled(n, c);
  }
  return out;
}

Tensor3 conv_backward_weights(const OneHotBatch& input, const PoolOutput& pool, const Matrix& dpooled,
                              std::size_t kmer_length, unsigned threads) {
  const std::size_t n_samples = input.batch_size();
  const std::size_t n_kernels = pool.values.cols();
  if (kmer_length == 0 || input.width() < kmer_length) throw ShapeError("conv backward: invalid kernel width");
  if (pool.values.rows() != n_samples || pool.windows != input.width() - kmer_length + 1 ||
      pool.argmax.size() != n_samples * n_kernels) {
    throw ShapeError("conv backward: pool output does not belong to this input (stale argmax)");
  }
  if (dpooled.rows() != n_samples || dpooled.cols() != n_kernels) {
    throw ShapeError("conv backward: gradient " + dims(dpooled.rows(), dpooled.cols()) + " vs pool " +
                     dims(n_samples, n_kernels));
  }
  Tensor3 grad(n_kernels, input.alphabet_size(), kmer_length);
  detail::parallel_for(n_kernels, threads, [&](std::size_t c) {
    for (std::size_t n = 0; n < n_samples; ++n) {
      const double g = dpooled(n, c);
      const std::size_t start = pool.argmax_at(n, c);
      for (std::size_t r = 0; r < kmer_length; ++r) {
        const Item item = input.item_at(n, start + r);
        if (item >= 0) grad(c, static_cast<std::size_t>(item), r) += g;
      }
    }
  });
  return grad;
}

Gradients backward_pass(const OneHotBatch& input, const PoolOutput& pool, const Matrix& dense_weights,
                        const Matrix& dlogits, std::size_t kmer_length, unsigned threads) {
  const std::size_t n_samples = input.batch_size();
  const std::size_t n_kernels = dense_weights.cols();
  const std::size_t d = dense_weights.rows();
  if (dlogits.rows() != n_samples || dlogits.cols() != d) {
    throw ShapeError("backward: dlogits " + dims(dlogits.rows(), dlogits.cols()) + ", expected " +
                     dims(n_samples, d));
  }
  if (pool.values.rows() != n_samples || pool.values.cols() != n_kernels) {
    throw ShapeError("backward: pool output " + dims(pool.values.rows(), pool.values.cols()) + ", expected " +
                     dims(n_samples, n_kernels));
  }

  Gradients g;
  g.dense = Matrix(d, n_kernels);
  for (std::size_t o = 0; o < d; ++o) {
    for (std::size_t c = 0; c < n_kernels; ++c) {
      double acc = 0.0;
      for (std::size_t n = 0; n < n_samples; ++n) acc += dlogits(n, o) * pool.values(n, c);
      g.dense(o, c) = acc;
    }
  }

  Matrix dpooled(n_samples, n_kernels);
  for (std::size_t n = 0; n < n_samples; ++n) {
    for (std::size_t c = 0; c < n_kernels; ++c) {
      double acc = 0.0;
      for (std::size_t o = 0; o < d; ++o) acc += dlogits(n, o) * dense_weights(o, c);
      dpooled(n, c) = acc;
    }
  }
  g.conv = conv_backward_weights(input, pool, dpooled, kmer_length, threads);
  return g;
}

}  // namespace hamenc
