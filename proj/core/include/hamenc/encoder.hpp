#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hamenc/data.hpp"
#include "hamenc/kmer_set.hpp"
#include "hamenc/nn.hpp"
#include "hamenc/quantize.hpp"
#include "hamenc/tensor.hpp"

namespace hamenc {

/// Training hyperparameters. Defaults: 1024 kernels, batch 64, 100 epochs,
/// Adam with lr 3e-4 and weight decay 1e-5.
struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  std::size_t kernels = 1024;
  std::size_t kmer_length = 0;  // 0 selects choose_k()
  double learning_rate = 3e-4;
  double weight_decay = 1e-5;
  std::uint64_t seed = 1;
  QuantizerKind quantizer = QuantizerKind::hamming;
  unsigned threads = 1;

  void validate() const;
};

/// Binarized conv encoder followed by a bias-free dense layer.
struct EncoderModel {
  Tensor3 conv_weights;   // real-valued master copy, [K x m x k]
  Matrix dense_weights;   // [d x K]
  QuantizerKind quantizer = QuantizerKind::hamming;
  ItemAlphabet alphabet;
  std::vector<std::string> class_names;
  std::size_t padded_width = 0;  // training-set max length, at least k

  std::size_t kernel_count() const noexcept { return conv_weights.dim0(); }
  std::size_t alphabet_size() const noexcept { return conv_weights.dim1(); }
  std::size_t kmer_length() const noexcept { return conv_weights.dim2(); }
  std::size_t num_classes() const noexcept { return dense_weights.rows(); }

  /// Kernels as seen by the forward pass.
  Tensor3 binary_kernels() const { return quantize_kernels(quantizer, conv_weights); }

  /// Width used to encode `length` symbols: never truncates, never below padded_width.
  std::size_t width_for(std::size_t length) const noexcept;

  void validate() const;

  bool operator==(const EncoderModel&) const = default;
};

struct ForwardResult {
  ConvOutput conv;
  PoolOutput pool;
  Matrix logits;
};

ForwardResult forward(const EncoderModel& model, const OneHotBatch& batch, unsigned threads = 1);

/// Argmax class per sequence. Each sequence is encoded at width_for(length).
std::vector<int> predict(const EncoderModel& model, std::span<const Sequence> sequences, unsigned threads = 1);

/// Uniform fan-in init: conv ~ U(+-1/sqrt(m*k)), dense ~ U(+-1/sqrt(K)).
EncoderModel init_model(const TrainConfig& config, std::size_t kmer_length, ItemAlphabet alphabet,
                        std::vector<std::string> class_names, std::size_t padded_width);

/// Loss and gradients of one mini-batch, without updating the model.
struct StepGradients {
  double loss = 0.0;
  Tensor3 grad_binary;  // dL/dw_b
  Tensor3 grad_real;    // dL/dw via the straight-through estimator
  Matrix grad_dense;
};

StepGradients compute_step(const EncoderModel& model, const OneHotBatch& batch, std::span<const int> labels,
                           unsigned threads = 1);

struct TrainResult {
  EncoderModel model;               // checkpoint with the lowest epoch-mean loss
  std::vector<double> loss_history; // epoch-mean training loss, one per epoch
  std::size_t best_epoch = 0;       // 1-based; 0 when no epoch ran
};

/// Called after each epoch with (1-based epoch, epoch-mean loss).
using EpochCallback = std::function<void(std::size_t, double)>;

/// Mini-batch training with seeded per-epoch shuffling. Every batch quantizes
/// the real kernels afresh, runs forward, cross-entropy, the STE backward pass
/// and an Adam update. Throws NumericError on a non-finite loss.
TrainResult train(const LabeledSequenceDataset& dataset, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// 5 when the median sequence length is at least 30, else 2.
std::size_t choose_k(const LabeledSequenceDataset& dataset);

/// config.kmer_length when set, else choose_k(dataset).
std::size_t resolve_kmer_length(const TrainConfig& config, const LabeledSequenceDataset& dataset);

/// One k-mer per kernel read off the hamming-quantized weights, deduplicated.
/// Throws UnsupportedError for any other quantizer.
KmerSet extract_kmers(const EncoderModel& model);

/// Binary model container; layout in docs/model_format.md.
void save_model(const EncoderModel& model, std::ostream& out);
void save_model(const EncoderModel& model, const std::filesystem::path& path);
EncoderModel load_model(std::istream& in);
EncoderModel load_model(const std::filesystem::path& path);

}  // namespace hamenc
