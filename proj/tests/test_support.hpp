#pragma once

// Reference implementations used as oracles. They work on plain token
// strings and nested vectors and share no code with the library.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hamenc/hamenc.hpp"

namespace hamenc::test {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::path(HAMENC_TEST_TMPDIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Sequence of single-character tokens, indexed by position in `alphabet`.
inline Sequence letters(const std::string& text, const std::string& alphabet = "ABC") {
  Sequence out;
  for (char c : text) out.push_back(static_cast<Item>(alphabet.find(c)));
  return out;
}

// Sliding-window scan over `seq` padded with a symbol that matches nothing.
inline int oracle_kh(const std::vector<int>& kmer, const std::vector<int>& seq, std::size_t width) {
  const std::size_t k = kmer.size();
  std::vector<int> padded(seq);
  padded.resize(std::max(width, seq.size()), -1000);
  int best = -1;
  for (std::size_t start = 0; start + k <= padded.size(); ++start) {
    int same = 0;
    for (std::size_t r = 0; r < k; ++r) same += padded[start + r] >= 0 && padded[start + r] == kmer[r];
    best = std::max(best, same);
  }
  return best;
}

// Dense dot-product cross-correlation on a [m][L] 0/1 matrix.
inline std::vector<double> oracle_conv(const std::vector<std::vector<double>>& kernel,
                                       const std::vector<std::vector<double>>& input) {
  const std::size_t m = kernel.size();
  const std::size_t k = kernel[0].size();
  const std::size_t L = input[0].size();
  std::vector<double> out;
  for (std::size_t j = 0; j + k <= L; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t r = 0; r < k; ++r) s += kernel[i][r] * input[i][j + r];
    }
    out.push_back(s);
  }
  return out;
}

inline std::vector<std::vector<double>> dense_one_hot(const Sequence& seq, std::size_t m, std::size_t width) {
  std::vector<std::vector<double>> out(m, std::vector<double>(width, 0.0));
  for (std::size_t j = 0; j < seq.size(); ++j) {
    if (seq[j] >= 0) out[static_cast<std::size_t>(seq[j])][j] = 1.0;
  }
  return out;
}

inline Sequence random_sequence(std::mt19937_64& rng, std::size_t length, std::size_t m) {
  std::uniform_int_distribution<Item> item(0, static_cast<Item>(m) - 1);
  Sequence s(length);
  for (auto& x : s) x = item(rng);
  return s;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix out(rows, cols);
  for (auto& v : out.values()) v = u(rng);
  return out;
}

inline Tensor3 random_tensor(std::mt19937_64& rng, std::size_t a, std::size_t b, std::size_t c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor3 out(a, b, c);
  for (auto& v : out.values()) v = u(rng);
  return out;
}

inline PlantedMotifConfig small_planted(double noise, std::uint64_t seed = 1) {
  PlantedMotifConfig config;
  config.alphabet_size = 10;
  config.motifs = {letters("ABABA", "ABCDEFGHIJ"), letters("CDCDC", "ABCDEFGHIJ")};
  config.per_class = 100;
  config.min_length = 30;
  config.max_length = 60;
  config.noise = noise;
  config.seed = seed;
  return config;
}

}  // namespace hamenc::test
