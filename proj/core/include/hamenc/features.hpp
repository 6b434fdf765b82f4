#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hamenc/data.hpp"
#include "hamenc/kmer_set.hpp"
#include "hamenc/tensor.hpp"

namespace hamenc {

/// Positions where the window and k-mer differ. A marker (padding or unknown
/// token) in either operand counts as a mismatch.
int hamming_distance(std::span<const Item> window, std::span<const Item> kmer);

/// k-mer Hamming similarity: k minus the smallest Hamming distance between
/// `kmer` and any length-k window of `sequence` padded to `width`.
int kh_similarity(std::span<const Item> kmer, std::span<const Item> sequence, std::size_t width);

/// Integer similarity matrix [N x |P|].
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  int& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  int operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const int> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const int> values() const noexcept { return data_; }

  Matrix to_matrix() const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<int> data_;
};

/// values[n, j] = kh_similarity(kmers[j], sequences[n], max(width, |s_n|)).
/// Throws ValidationError for an empty k-mer set or width < k.
FeatureMatrix featurize(std::span<const Sequence> sequences, const KmerSet& kmers, std::size_t width,
                        unsigned threads = 1);

struct EquivalenceCheckOptions {
  std::size_t alphabet_size = 26;  // upper bound; each trial draws m in [1, this]
  std::size_t max_length = 50;
  std::size_t max_k = 8;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  // Test-only fault injection applied to the network value of each trial.
  std::function<int(int)> perturb_network;
};

struct EquivalenceCounterexample {
  std::size_t trial = 0;
  std::size_t alphabet_size = 0;
  Sequence sequence;
  Sequence kmer;
  int network_value = 0;
  int hamming_value = 0;
};

struct EquivalenceCheckReport {
  std::size_t trials = 0;
  std::size_t mismatches = 0;
  std::optional<EquivalenceCounterexample> first_mismatch;
};

/// Compares conv + global max pool (kernel = one-hot of the k-mer) against
/// the Hamming scan on random sequences and k-mers.
EquivalenceCheckReport verify_equivalence(const EquivalenceCheckOptions& options);

/// CSV with header `label,<k-mer>,...`; k-mer columns are tokens joined by `|`.
void export_features(const FeatureMatrix& features, std::span<const int> labels,
                     const std::vector<std::string>& class_names, const KmerSet& kmers,
                     const ItemAlphabet& alphabet, std::ostream& out);
void export_features(const FeatureMatrix& features, std::span<const int> labels,
                     const std::vector<std::string>& class_names, const KmerSet& kmers,
                     const ItemAlphabet& alphabet, const std::filesystem::path& path);

struct FeatureTable {
  std::vector<std::string> columns;  // k-mer column names, without `label`
  std::vector<std::string> labels;
  FeatureMatrix values;
};

FeatureTable read_features_csv(std::istream& in);

}  // namespace hamenc
