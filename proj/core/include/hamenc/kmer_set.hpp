#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hamenc/data.hpp"

namespace hamenc {

/// Distinct k-mers in first-seen order, each with the kernels it came from.
class KmerSet {
 public:
  explicit KmerSet(std::size_t k = 0) : k_(k) {}

  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return kmers_.size(); }
  bool empty() const noexcept { return kmers_.empty(); }

  const Sequence& operator[](std::size_t i) const { return kmers_[i]; }
  const std::vector<Sequence>& kmers() const noexcept { return kmers_; }

  /// Source kernel indices of k-mer i, ascending.
  const std::vector<std::size_t>& provenance(std::size_t i) const { return provenance_[i]; }

  /// Adds `kmer` from `kernel`, merging with an identical existing entry.
  /// Returns the entry's index. Throws ShapeError on a length mismatch.
  std::size_t add(Sequence kmer, std::size_t kernel);

 private:
  std::size_t k_;
  std::vector<Sequence> kmers_;
  std::vector<std::vector<std::size_t>> provenance_;
};

/// Tokens of `kmer` joined by `separator`.
std::string join_tokens(std::span<const Item> kmer, const ItemAlphabet& alphabet,
                        std::string_view separator = " ");

}  // namespace hamenc
