#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hamenc/data.hpp"
#include "hamenc/encoder.hpp"
#include "hamenc/tensor.hpp"

namespace hamenc {

// --- classifiers -------------------------------------------------------------

enum class ClassifierKind { knn, gnb, svm };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view name);

/// Euclidean k-nearest neighbours with majority vote. Vote ties go to the
/// tied class of the nearest neighbour; equidistant neighbours are ordered by
/// class index. `neighbors` is clamped to the training size.
class KnnClassifier {
 public:
  explicit KnnClassifier(std::size_t neighbors = 5) : neighbors_(neighbors) {}

  void fit(const Matrix& features, std::span<const int> labels);
  int predict_one(std::span<const double> x) const;
  std::vector<int> predict(const Matrix& features) const;

 private:
  std::size_t neighbors_;
  Matrix train_;
  std::vector<int> labels_;
  int num_classes_ = 0;
};

/// Gaussian naive Bayes; per-class, per-feature variance floored at 1e-9.
class GaussianNaiveBayes {
 public:
  static constexpr double kVarianceFloor = 1e-9;

  void fit(const Matrix& features, std::span<const int> labels);

  /// log P(c) + sum_f log N(x_f; mu_cf, var_cf) for every class; classes
  /// absent from training get -infinity.
  std::vector<double> log_joint(std::span<const double> x) const;
  int predict_one(std::span<const double> x) const;
  std::vector<int> predict(const Matrix& features) const;

  const Matrix& means() const noexcept { return means_; }
  const Matrix& variances() const noexcept { return variances_; }

 private:
  Matrix means_;
  Matrix variances_;
  std::vector<double> log_priors_;
};

struct SvmOptions {
  std::size_t epochs = 100;
  double learning_rate = 0.1;
  double regularization = 1e-3;
  std::uint64_t seed = 1;
};

/// One-vs-rest linear SVM trained by stochastic subgradient descent on the
/// L2-regularized hinge loss, over train-standardized features.
class LinearSvm {
 public:
  explicit LinearSvm(SvmOptions options = {}) : options_(options) {}

  /// Returns the objective (sum over one-vs-rest problems of reg/2 |w|^2 +
  /// mean hinge) before training and after each epoch.
  std::vector<double> fit(const Matrix& features, std::span<const int> labels);
  std::vector<double> scores(std::span<const double> x) const;
  int predict_one(std::span<const double> x) const;
  std::vector<int> predict(const Matrix& features) const;

 private:
  double objective(const Matrix& standardized, std::span<const int> labels) const;

  SvmOptions options_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  Matrix weights_;             // [d x F]
  std::vector<double> bias_;   // [d]
};

std::vector<int> classify_knn(const Matrix& train, std::span<const int> labels, const Matrix& test,
                              std::size_t neighbors = 5);
std::vector<int> classify_gnb(const Matrix& train, std::span<const int> labels, const Matrix& test);
std::vector<int> classify_linear_svm(const Matrix& train, std::span<const int> labels, const Matrix& test,
                                     const SvmOptions& options = {});

/// Fraction of positions where predicted == truth. Empty input gives 0.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

// --- cross-validation ----------------------------------------------------------

struct CvPlan {
  std::size_t folds = 5;
  std::size_t repeats = 5;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Stratified fold index per record. Fold sizes differ by at most one, and
/// each class's share of a fold is within 1/fold-size of its global share.
/// Throws ValidationError naming the first class with fewer than `folds` members.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, const std::vector<std::string>& class_names,
                                          std::size_t folds, std::uint64_t seed);

/// One fold's inputs, derived only from its training split.
struct FoldData {
  LabeledSequenceDataset train;       // re-indexed over the training alphabet
  std::vector<Sequence> test;         // re-indexed; unseen tokens -> kUnknownItem
  std::vector<int> test_labels;
};

FoldData prepare_fold(const LabeledSequenceDataset& dataset, std::span<const std::size_t> train_indices,
                      std::span<const std::size_t> test_indices);

struct FoldContext {
  std::size_t repeat;
  std::size_t fold;
  std::span<const std::size_t> train_indices;
  std::span<const std::size_t> test_indices;
  const FoldData& data;
};

struct FoldRecord {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::string classifier;
  double accuracy = 0.0;
  std::size_t n_patterns = 0;
  double train_seconds = 0.0;
};

struct EvalReport {
  std::vector<FoldRecord> records;

  double mean_accuracy() const;
  std::map<std::string, double> per_classifier_mean() const;
  double total_train_seconds() const;
};

struct EvalOptions {
  unsigned threads = 1;          // folds run concurrently; each fold is single-threaded
  bool record_timings = true;    // false writes train_seconds = 0
  // Invoked once per fold before training; may run concurrently when threads > 1.
  std::function<void(const FoldContext&)> on_fold;
};

struct PipelineOptions {
  TrainConfig train;
  std::vector<ClassifierKind> classifiers{ClassifierKind::knn, ClassifierKind::gnb, ClassifierKind::svm};
  std::size_t knn_neighbors = 5;
  SvmOptions svm;
};

/// Per fold: train the encoder on the training split, extract k-mers,
/// featurize both splits, then fit and score every classifier.
EvalReport cross_validate(const LabeledSequenceDataset& dataset, const PipelineOptions& pipeline,
                          const CvPlan& plan, const EvalOptions& options = {});

/// Per fold: train with `quantizer` and classify the test split with the
/// network's own argmax. Classifier name is `e2e-<quantizer>`.
EvalReport end_to_end_eval(const LabeledSequenceDataset& dataset, const TrainConfig& config,
                           QuantizerKind quantizer, const CvPlan& plan, const EvalOptions& options = {});

// --- reporting -------------------------------------------------------------

/// One JSON object per fold record: repeat, fold, classifier, accuracy,
/// n_patterns, train_seconds.
void write_jsonl(const EvalReport& report, std::ostream& out);

/// Human-readable per-classifier summary.
std::string format_table(const EvalReport& report);

/// One row per quantizer with mean and standard deviation of fold accuracy.
std::string format_quantizer_comparison(std::span<const std::pair<QuantizerKind, EvalReport>> reports);

}  // namespace hamenc
