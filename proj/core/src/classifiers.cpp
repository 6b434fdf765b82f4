#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <tuple>

#include "hamenc/error.hpp"
#include "hamenc/eval.hpp"
#include "seeding.hpp"

namespace hamenc {
namespace {

int class_count(std::span<const int> labels) {
  int d = 0;
  for (int y : labels) {
    if (y < 0) throw ValidationError("negative class label");
    d = std::max(d, y + 1);
  }
  return d;
}

void check_training_set(const Matrix& features, std::span<const int> labels) {
  if (features.rows() == 0) throw ValidationError("classifier needs a non-empty training set");
  if (features.rows() != labels.size()) {
    throw ShapeError(std::to_string(labels.size()) + " labels for " + std::to_string(features.rows()) + " rows");
  }
}

int argmax_lowest(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<int>(best);
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::gnb: return "gnb";
    case ClassifierKind::svm: return "svm";
  }
  return "unknown";
}

ClassifierKind parse_classifier(std::string_view name) {
  if (name == "knn") return ClassifierKind::knn;
  if (name == "gnb" || name == "nb") return ClassifierKind::gnb;
  if (name == "svm") return ClassifierKind::svm;
  throw ValidationError("unknown classifier '" + std::string(name) + "'");
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw ShapeError("accuracy: prediction and truth lengths differ");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

// --- kNN -------------------------------------------------------------------

void KnnClassifier::fit(const Matrix& features, std::span<const int> labels) {
  check_training_set(features, labels);
  if (neighbors_ == 0) throw ValidationError("kNN needs at least one neighbour");
  train_ = features;
  labels_.assign(labels.begin(), labels.end());
  num_classes_ = class_count(labels);
}

int KnnClassifier::predict_one(std::span<const double> x) const {
  if (x.size() != train_.cols()) throw ShapeError("kNN: feature width differs from training data");
  // (squared distance, label, index); squared distance orders like Euclidean.
  std::vector<std::tuple<double, int, std::size_t>> nearest;
  nearest.reserve(train_.rows());
  for (std::size_t i = 0; i < train_.rows(); ++i) {
    double d2 = 0.0;
    auto row = train_.row(i);
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double diff = row[f] - x[f];
      d2 += diff * diff;
    }
    nearest.emplace_back(d2, labels_[i], i);
  }
  const std::size_t k = std::min(neighbors_, nearest.size());
  std::partial_sort(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>(k), nearest.end());

  std::vector<std::size_t> votes(static_cast<std::size_t>(num_classes_), 0);
  for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(std::get<1>(nearest[i]))];
  const std::size_t top = *std::max_element(votes.begin(), votes.end());
  for (std::size_t i = 0; i < k; ++i) {
    const int label = std::get<1>(nearest[i]);
    if (votes[static_cast<std::size_t>(label)] == top) return label;
  }
  return 0;  // unreachable: some neighbour carries the top vote
}

std::vector<int> KnnClassifier::predict(const Matrix& features) const {
  std::vector<int> out;
  out.reserve(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out.push_back(predict_one(features.row(i)));
  return out;
}

// --- Gaussian NB -----------------------------------------------------------

void GaussianNaiveBayes::fit(const Matrix& features, std::span<const int> labels) {
  check_training_set(features, labels);
  const auto d = static_cast<std::size_t>(class_count(labels));
  const std::size_t f = features.cols();
  means_ = Matrix(d, f);
  variances_ = Matrix(d, f);
  std::vector<std::size_t> counts(d, 0);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    ++counts[c];
    for (std::size_t j = 0; j < f; ++j) means_(c, j) += features(i, j);
  }
  for (std::size_t c = 0; c < d; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < f; ++j) means_(c, j) /= static_cast<double>(counts[c]);
  }
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    for (std::size_t j = 0; j < f; ++j) {
      const double diff = features(i, j) - means_(c, j);
      variances_(c, j) += diff * diff;
    }
  }
  log_priors_.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t j = 0; j < f; ++j) {
      const double var = counts[c] ? variances_(c, j) / static_cast<double>(counts[c]) : 0.0;
      variances_(c, j) = std::max(var, kVarianceFloor);
    }
    if (counts[c]) {
      log_priors_[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(features.rows()));
    }
  }
}

std::vector<double> GaussianNaiveBayes::log_joint(std::span<const double> x) const {
  if (x.size() != means_.cols()) throw ShapeError("naive Bayes: feature width differs from training data");
  std::vector<double> out(log_priors_.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    double lp = log_priors_[c];
    if (std::isfinite(lp)) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double var = variances_(c, j);
        const double diff = x[j] - means_(c, j);
        lp += -0.5 * std::log(2.0 * std::numbers::pi * var) - diff * diff / (2.0 * var);
      }
    }
    out[c] = lp;
  }
  return out;
}

int GaussianNaiveBayes::predict_one(std::span<const double> x) const { return argmax_lowest(log_joint(x)); }

std::vector<int> GaussianNaiveBayes::predict(const Matrix& features) const {
  std::vector<int> out;
  out.reserve(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out.push_back(predict_one(features.row(i)));
  return out;
}

// --- linear SVM ------------------------------------------------------------

std::vector<double> LinearSvm::fit(const Matrix& features, std::span<const int> labels) {
  check_training_set(features, labels);
  const std::size_t n = features.rows();
  const std::size_t f = features.cols();
  const auto d = static_cast<std::size_t>(class_count(labels));

  mean_.assign(f, 0.0);
  scale_.assign(f, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) mean_[j] += features(i, j);
  }
  for (auto& m : mean_) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const double diff = features(i, j) - mean_[j];
      scale_[j] += diff * diff;
    }
  }
  for (auto& s : scale_) {
    s = std::sqrt(s / static_cast<double>(n));
    if (s < 1e-12) s = 1.0;
  }
  Matrix x(n, f);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) x(i, j) = (features(i, j) - mean_[j]) / scale_[j];
  }

  weights_ = Matrix(d, f);
  bias_.assign(d, 0.0);
  std::vector<double> history{objective(x, labels)};
  std::mt19937_64 rng(detail::derive_seed(options_.seed, detail::kSvmStream));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double reg = options_.regularization;

  for (std::size_t epoch = 0; epoch < options_.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double eta = options_.learning_rate / std::sqrt(1.0 + static_cast<double>(epoch));
    for (std::size_t i : order) {
      auto xi = x.row(i);
      for (std::size_t c = 0; c < d; ++c) {
        const double y = labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
        auto w = weights_.row(c);
        double score = bias_[c];
        for (std::size_t j = 0; j < f; ++j) score += w[j] * xi[j];
        const bool active = y * score < 1.0;
        for (std::size_t j = 0; j < f; ++j) w[j] -= eta * (reg * w[j] - (active ? y * xi[j] : 0.0));
        if (active) bias_[c] += eta * y;
      }
    }
    history.push_back(objective(x, labels));
  }
  return history;
}

double LinearSvm::objective(const Matrix& standardized, std::span<const int> labels) const {
  double total = 0.0;
  const std::size_t n = standardized.rows();
  for (std::size_t c = 0; c < weights_.rows(); ++c) {
    auto w = weights_.row(c);
    double norm2 = 0.0;
    for (double v : w) norm2 += v * v;
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = labels[i] == static_cast<int>(c) ? 1.0 : -1.0;
      double score = bias_[c];
      auto xi = standardized.row(i);
      for (std::size_t j = 0; j < w.size(); ++j) score += w[j] * xi[j];
      hinge += std::max(0.0, 1.0 - y * score);
    }
    total += 0.5 * options_.regularization * norm2 + hinge / static_cast<double>(n);
  }
  return total;
}

std::vector<double> LinearSvm::scores(std::span<const double> x) const {
  if (x.size() != mean_.size()) throw ShapeError("SVM: feature width differs from training data");
  std::vector<double> out(weights_.rows());
  for (std::size_t c = 0; c < out.size(); ++c) {
    double s = bias_[c];
    auto w = weights_.row(c);
    for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * (x[j] - mean_[j]) / scale_[j];
    out[c] = s;
  }
  return out;
}

int LinearSvm::predict_one(std::span<const double> x) const { return argmax_lowest(scores(x)); }

std::vector<int> LinearSvm::predict(const Matrix& features) const {
  std::vector<int> out;
  out.reserve(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) out.push_back(predict_one(features.row(i)));
  return out;
}

std::vector<int> classify_knn(const Matrix& train, std::span<const int> labels, const Matrix& test,
                              std::size_t neighbors) {
  KnnClassifier knn(neighbors);
  knn.fit(train, labels);
  return knn.predict(test);
}

std::vector<int> classify_gnb(const Matrix& train, std::span<const int> labels, const Matrix& test) {
  GaussianNaiveBayes gnb;
  gnb.fit(train, labels);
  return gnb.predict(test);
}

std::vector<int> classify_linear_svm(const Matrix& train, std::span<const int> labels, const Matrix& test,
                                     const SvmOptions& options) {
  LinearSvm svm(options);
  svm.fit(train, labels);
  return svm.predict(test);
}

}  // namespace hamenc
