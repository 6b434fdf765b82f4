#include "hamenc/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hamenc/error.hpp"
#include "seeding.hpp"

namespace hamenc {

void TrainConfig::validate() const {
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  if (kernels == 0) throw ValidationError("kernel count must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be positive");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ValidationError("weight decay must be non-negative");
  }
  if (threads == 0) throw ValidationError("thread count must be positive");
}

std::size_t EncoderModel::width_for(std::size_t length) const noexcept {
  return std::max({padded_width, length, kmer_length()});
}

void EncoderModel::validate() const {
  if (kmer_length() == 0) throw ValidationError("model k-mer length must be positive");
  if (kernel_count() == 0) throw ValidationError("model needs at least one kernel");
  if (alphabet_size() != alphabet.size()) {
    throw ValidationError("model kernels have " + std::to_string(alphabet_size()) + " rows but the alphabet has " +
                          std::to_string(alphabet.size()) + " symbols");
  }
  if (dense_weights.cols() != kernel_count()) throw ValidationError("dense layer width differs from kernel count");
  if (num_classes() != class_names.size()) throw ValidationError("dense layer rows differ from class count");
  if (padded_width < kmer_length()) throw ValidationError("padded width is shorter than k");
}

ForwardResult forward(const EncoderModel& model, const OneHotBatch& batch, unsigned threads) {
  ForwardResult out;
  out.conv = conv1d_valid(batch, model.binary_kernels(), threads);
  out.pool = global_max_pool(out.conv);
  out.logits = dense_forward(out.pool.values, model.dense_weights);
  return out;
}

std::vector<int> predict(const EncoderModel& model, std::span<const Sequence> sequences, unsigned threads) {
  const Tensor3 kernels = model.binary_kernels();
  std::vector<int> out;
  out.reserve(sequences.size());
  for (const auto& s : sequences) {
    auto batch = one_hot_encode(std::span(&s, 1), model.alphabet_size(), model.width_for(s.size()));
    auto pool = global_max_pool(conv1d_valid(batch, kernels, threads));
    auto logits = dense_forward(pool.values, model.dense_weights);
    auto row = logits.row(0);
    out.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
  }
  return out;
}

EncoderModel init_model(const TrainConfig& config, std::size_t kmer_length, ItemAlphabet alphabet,
                        std::vector<std::string> class_names, std::size_t padded_width) {
  config.validate();
  if (kmer_length == 0) throw ValidationError("k-mer length must be positive");
  const std::size_t m = alphabet.size();
  const std::size_t d = class_names.size();
  if (m == 0 || d == 0) throw ValidationError("alphabet and class list must be non-empty");

  EncoderModel model;
  model.conv_weights = Tensor3(config.kernels, m, kmer_length);
  model.dense_weights = Matrix(d, config.kernels);
  model.quantizer = config.quantizer;
  model.alphabet = std::move(alphabet);
  model.class_names = std::move(class_names);
  model.padded_width = std::max(padded_width, kmer_length);

  std::mt19937_64 rng(detail::derive_seed(config.seed, detail::kInitStream));
  const double conv_bound = 1.0 / std::sqrt(static_cast<double>(m * kmer_length));
  std::uniform_real_distribution<double> conv_dist(-conv_bound, conv_bound);
  for (auto& w : model.conv_weights.values()) w = conv_dist(rng);
  const double dense_bound = 1.0 / std::sqrt(static_cast<double>(config.kernels));
  std::uniform_real_distribution<double> dense_dist(-dense_bound, dense_bound);
  for (auto& w : model.dense_weights.values()) w = dense_dist(rng);
  return model;
}

namespace {

struct BatchGradients {
  double loss = 0.0;
  Gradients grads;
};

BatchGradients batch_gradients(const EncoderModel& model, const OneHotBatch& batch, std::span<const int> labels,
                               unsigned threads) {
  auto fwd = forward(model, batch, threads);
  auto loss = softmax_cross_entropy(fwd.logits, labels);
  auto grads = backward_pass(batch, fwd.pool, model.dense_weights, loss.dlogits, model.kmer_length(), threads);
  return {loss.loss, std::move(grads)};
}

}  // namespace

StepGradients compute_step(const EncoderModel& model, const OneHotBatch& batch, std::span<const int> labels,
                           unsigned threads) {
  auto step = batch_gradients(model, batch, labels, threads);
  StepGradients out;
  out.loss = step.loss;
  out.grad_binary = step.grads.conv;
  out.grad_real = ste_passthrough(std::move(step.grads.conv));
  out.grad_dense = std::move(step.grads.dense);
  return out;
}

TrainResult train(const LabeledSequenceDataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch) {
  dataset.validate();
  config.validate();
  const std::size_t k = resolve_kmer_length(config, dataset);
  const std::size_t width = std::max(dataset.max_length(), k);

  TrainResult result;
  result.model = init_model(config, k, dataset.alphabet, dataset.class_names, width);
  EncoderModel& model = result.model;
  if (config.epochs == 0) return result;

  const auto sequences = dataset.sequences();
  const auto labels = dataset.labels();
  const std::size_t n_records = sequences.size();
  const AdamConfig adam{config.learning_rate, 0.9, 0.999, 1e-8, config.weight_decay};
  AdamState conv_state(model.conv_weights.size(), adam);
  AdamState dense_state(model.dense_weights.size(), adam);

  std::mt19937_64 shuffle_rng(detail::derive_seed(config.seed, detail::kShuffleStream));
  std::vector<std::size_t> order(n_records);
  std::iota(order.begin(), order.end(), std::size_t{0});

  EncoderModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<Sequence> batch_sequences;
  std::vector<int> batch_labels;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n_records; start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(n_records, start + config.batch_size);
      batch_sequences.clear();
      batch_labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch_sequences.push_back(sequences[order[i]]);
        batch_labels.push_back(labels[order[i]]);
      }
      auto batch = one_hot_encode(batch_sequences, model.alphabet_size(), width);

      BatchGradients step;
      try {
        step = batch_gradients(model, batch, batch_labels, config.threads);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": " + e.what());
      }
      if (!std::isfinite(step.loss)) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + ": non-finite loss");
      }
      total += step.loss * static_cast<double>(end - start);

      auto grad_real = ste_passthrough(std::move(step.grads.conv));
      adam_step(model.conv_weights.values(), grad_real.values(), conv_state);
      adam_step(model.dense_weights.values(), step.grads.dense.values(), dense_state);
    }
    const double mean = total / static_cast<double>(n_records);
    result.loss_history.push_back(mean);
    if (mean < best_loss) {
      best_loss = mean;
      best = model;
      result.best_epoch = epoch;
    }
    if (on_epoch) on_epoch(epoch, mean);
  }
  model = std::move(best);
  return result;
}

std::size_t choose_k(const LabeledSequenceDataset& dataset) {
  if (dataset.records.empty()) throw ValidationError("cannot choose k for an empty dataset");
  std::vector<std::size_t> lengths;
  lengths.reserve(dataset.records.size());
  for (const auto& r : dataset.records) lengths.push_back(r.items.size());
  std::sort(lengths.begin(), lengths.end());
  const std::size_t mid = lengths.size() / 2;
  const double median = lengths.size() % 2 == 1
                            ? static_cast<double>(lengths[mid])
                            : 0.5 * static_cast<double>(lengths[mid - 1] + lengths[mid]);
  return median >= 30.0 ? 5 : 2;
}

std::size_t resolve_kmer_length(const TrainConfig& config, const LabeledSequenceDataset& dataset) {
  return config.kmer_length != 0 ? config.kmer_length : choose_k(dataset);
}

KmerSet extract_kmers(const EncoderModel& model) {
  if (model.quantizer != QuantizerKind::hamming) {
    throw UnsupportedError("k-mer extraction needs a hamming-quantized model, this one uses '" +
                           std::string(to_string(model.quantizer)) + "'");
  }
  const std::size_t m = model.alphabet_size();
  const std::size_t k = model.kmer_length();
  const Tensor3 binary = model.binary_kernels();
  KmerSet set(k);
  std::vector<std::uint8_t> column(m);
  for (std::size_t c = 0; c < model.kernel_count(); ++c) {
    Sequence kmer(k);
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t i = 0; i < m; ++i) column[i] = binary(c, i, r) != 0.0 ? 1 : 0;
      auto item = inverse_one_hot_index(column);
      if (!item) throw ValidationError("quantized kernel column has no active row");
      kmer[r] = *item;
    }
    set.add(std::move(kmer), c);
  }
  return set;
}

}  // namespace hamenc
