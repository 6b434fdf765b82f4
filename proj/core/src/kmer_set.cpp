#include "hamenc/kmer_set.hpp"

#include <algorithm>

#include "hamenc/error.hpp"

namespace hamenc {

std::size_t KmerSet::add(Sequence kmer, std::size_t kernel) {
  if (kmer.size() != k_) {
    throw ShapeError("k-mer of length " + std::to_string(kmer.size()) + " added to a set with k = " +
                     std::to_string(k_));
  }
  auto it = std::find(kmers_.begin(), kmers_.end(), kmer);
  if (it != kmers_.end()) {
    const auto index = static_cast<std::size_t>(it - kmers_.begin());
    auto& sources = provenance_[index];
    sources.insert(std::upper_bound(sources.begin(), sources.end(), kernel), kernel);
    return index;
  }
  kmers_.push_back(std::move(kmer));
  provenance_.push_back({kernel});
  return kmers_.size() - 1;
}

std::string join_tokens(std::span<const Item> kmer, const ItemAlphabet& alphabet, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < kmer.size(); ++i) {
    if (i) out += separator;
    out += alphabet.render(kmer[i]);
  }
  return out;
}

}  // namespace hamenc
