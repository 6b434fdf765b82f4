#include <algorithm>
#include <random>
#include <set>

#include "hamenc/data.hpp"
#include "hamenc/error.hpp"

namespace hamenc {

std::string default_symbol(std::size_t index) {
  if (index < 26) return std::string(1, static_cast<char>('A' + index));
  if (index < 52) return std::string(1, static_cast<char>('a' + (index - 26)));
  return "s" + std::to_string(index);
}

ItemAlphabet default_alphabet(std::size_t size) {
  ItemAlphabet alphabet;
  for (std::size_t i = 0; i < size; ++i) alphabet.add(default_symbol(i));
  return alphabet;
}

std::vector<Sequence> random_motifs(std::size_t count, std::size_t length, std::size_t alphabet_size,
                                    std::uint64_t seed) {
  if (length == 0 || alphabet_size == 0) throw ValidationError("motif length and alphabet size must be positive");
  // Guard against asking for more distinct motifs than exist.
  double available = 1.0;
  for (std::size_t i = 0; i < length && available < 1e18; ++i) available *= static_cast<double>(alphabet_size);
  if (static_cast<double>(count) > available) {
    throw ValidationError("cannot draw " + std::to_string(count) + " distinct motifs of length " +
                          std::to_string(length) + " over " + std::to_string(alphabet_size) + " symbols");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Item> symbol(0, static_cast<Item>(alphabet_size - 1));
  std::set<Sequence> seen;
  std::vector<Sequence> motifs;
  while (motifs.size() < count) {
    Sequence m(length);
    for (auto& x : m) x = symbol(rng);
    if (seen.insert(m).second) motifs.push_back(std::move(m));
  }
  return motifs;
}

PlantedMotifResult generate_planted_motif_dataset(const PlantedMotifConfig& config) {
  const auto m = config.alphabet_size;
  const auto d = config.motifs.size();
  if (d < 2) throw ValidationError("planted-motif data needs at least two classes");
  if (m == 0) throw ValidationError("alphabet size must be positive");
  if (config.min_length == 0 || config.min_length > config.max_length) {
    throw ValidationError("length range must satisfy 1 <= lmin <= lmax");
  }
  if (!(config.noise >= 0.0 && config.noise < 1.0)) throw ValidationError("noise rate must lie in [0, 1)");
  if (config.noise > 0.0 && m < 2) throw ValidationError("noise needs at least two symbols");
  if (config.per_class == 0) throw ValidationError("sequences per class must be positive");
  std::set<Sequence> distinct(config.motifs.begin(), config.motifs.end());
  if (distinct.size() != d) throw ValidationError("class motifs must be distinct");
  for (const auto& motif : config.motifs) {
    if (motif.empty()) throw ValidationError("motifs must be non-empty");
    if (motif.size() > config.min_length) {
      throw ValidationError("motif of length " + std::to_string(motif.size()) + " is longer than lmin " +
                            std::to_string(config.min_length));
    }
    for (auto x : motif) {
      if (x < 0 || static_cast<std::size_t>(x) >= m) throw ValidationError("motif symbol outside alphabet");
    }
  }

  PlantedMotifResult out;
  out.dataset.alphabet = default_alphabet(m);
  for (std::size_t c = 0; c < d; ++c) out.dataset.class_names.push_back("class" + std::to_string(c));

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<Item> symbol(0, static_cast<Item>(m - 1));
  std::uniform_int_distribution<std::size_t> length(config.min_length, config.max_length);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t c = 0; c < d; ++c) {
    const auto& motif = config.motifs[c];
    for (std::size_t i = 0; i < config.per_class; ++i) {
      Sequence s(length(rng));
      for (auto& x : s) x = symbol(rng);
      std::uniform_int_distribution<std::size_t> offset_dist(0, s.size() - motif.size());
      const auto offset = offset_dist(rng);
      for (std::size_t r = 0; r < motif.size(); ++r) {
        Item x = motif[r];
        ++out.motif_positions;
        if (unit(rng) < config.noise) {
          // Uniform over the m - 1 other symbols.
          std::uniform_int_distribution<Item> other(0, static_cast<Item>(m - 2));
          Item y = other(rng);
          x = y >= x ? y + 1 : y;
          ++out.corrupted_positions;
        }
        s[offset + r] = x;
      }
      out.dataset.records.push_back({std::move(s), static_cast<int>(c)});
      out.motif_offsets.push_back(offset);
    }
  }
  return out;
}

}  // namespace hamenc
