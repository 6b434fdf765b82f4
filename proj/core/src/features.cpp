#include "hamenc/features.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "hamenc/error.hpp"
#include "hamenc/nn.hpp"
#include "parallel.hpp"
#include "seeding.hpp"

namespace hamenc {

int hamming_distance(std::span<const Item> window, std::span<const Item> kmer) {
  if (window.size() != kmer.size()) {
    throw ShapeError("hamming distance: window of length " + std::to_string(window.size()) + " vs k-mer of length " +
                     std::to_string(kmer.size()));
  }
  int distance = 0;
  for (std::size_t i = 0; i < kmer.size(); ++i) {
    if (window[i] < 0 || kmer[i] < 0 || window[i] != kmer[i]) ++distance;
  }
  return distance;
}

int kh_similarity(std::span<const Item> kmer, std::span<const Item> sequence, std::size_t width) {
  const std::size_t k = kmer.size();
  if (k == 0) throw ValidationError("KH similarity needs a non-empty k-mer");
  if (width < k) {
    throw ValidationError("padded width " + std::to_string(width) + " is shorter than k = " + std::to_string(k));
  }
  if (width < sequence.size()) {
    throw ValidationError("padded width " + std::to_string(width) + " is shorter than the sequence (" +
                          std::to_string(sequence.size()) + ")");
  }
  const auto at = [&](std::size_t j) { return j < sequence.size() ? sequence[j] : kPadItem; };
  int best = static_cast<int>(k);
  for (std::size_t start = 0; start + k <= width && best > 0; ++start) {
    int distance = 0;
    for (std::size_t r = 0; r < k && distance < best; ++r) {
      const Item t = at(start + r);
      if (t < 0 || kmer[r] < 0 || t != kmer[r]) ++distance;
    }
    best = std::min(best, distance);
  }
  return static_cast<int>(k) - best;
}

Matrix FeatureMatrix::to_matrix() const {
  Matrix m(rows_, cols_);
  auto dst = m.values();
  for (std::size_t i = 0; i < data_.size(); ++i) dst[i] = static_cast<double>(data_[i]);
  return m;
}

FeatureMatrix featurize(std::span<const Sequence> sequences, const KmerSet& kmers, std::size_t width,
                        unsigned threads) {
  if (kmers.empty()) throw ValidationError("cannot featurize against an empty k-mer set");
  if (width < kmers.k()) {
    throw ValidationError("padded width " + std::to_string(width) + " is shorter than k = " +
                          std::to_string(kmers.k()));
  }
  FeatureMatrix out(sequences.size(), kmers.size());
  detail::parallel_for(sequences.size(), threads, [&](std::size_t n) {
    const auto& s = sequences[n];
    const std::size_t w = std::max(width, s.size());
    for (std::size_t j = 0; j < kmers.size(); ++j) out(n, j) = kh_similarity(kmers[j], s, w);
  });
  return out;
}

EquivalenceCheckReport verify_equivalence(const EquivalenceCheckOptions& options) {
  if (options.trials == 0) throw ValidationError("verification needs at least one trial");
  if (options.alphabet_size == 0 || options.max_length == 0 || options.max_k == 0) {
    throw ValidationError("alphabet size, max length and max k must be positive");
  }
  std::mt19937_64 rng(detail::derive_seed(options.seed, detail::kVerifyStream));
  std::uniform_int_distribution<std::size_t> alphabet_dist(1, options.alphabet_size);
  std::uniform_int_distribution<std::size_t> length_dist(1, options.max_length);
  std::uniform_int_distribution<std::size_t> k_dist(1, options.max_k);
  std::bernoulli_distribution plant(0.25);

  EquivalenceCheckReport report;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const std::size_t m = alphabet_dist(rng);
    const std::size_t len = length_dist(rng);
    const std::size_t k = k_dist(rng);
    std::uniform_int_distribution<Item> symbol(0, static_cast<Item>(m - 1));
    Sequence s(len);
    for (auto& x : s) x = symbol(rng);
    Sequence p(k);
    if (k <= len && plant(rng)) {
      std::uniform_int_distribution<std::size_t> offset(0, len - k);
      const auto at = offset(rng);
      std::copy_n(s.begin() + static_cast<std::ptrdiff_t>(at), k, p.begin());
    } else {
      for (auto& x : p) x = symbol(rng);
    }
    const std::size_t width = std::max(len, k);

    // Network path: the k-mer's one-hot matrix as the only kernel.
    Tensor3 kernel(1, m, k);
    for (std::size_t r = 0; r < k; ++r) kernel(0, static_cast<std::size_t>(p[r]), r) = 1.0;
    auto batch = one_hot_encode(std::span(&s, 1), m, width);
    auto pooled = global_max_pool(conv1d_valid(batch, kernel));
    int network = static_cast<int>(pooled.values(0, 0));
    if (static_cast<double>(network) != pooled.values(0, 0)) network = -1;
    if (options.perturb_network) network = options.perturb_network(network);

    const int hamming = kh_similarity(p, s, width);
    ++report.trials;
    if (network != hamming) {
      ++report.mismatches;
      if (!report.first_mismatch) report.first_mismatch = EquivalenceCounterexample{trial, m, s, p, network, hamming};
    }
  }
  return report;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one CSV record; handles quoted fields with doubled quotes.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

}  // namespace

void export_features(const FeatureMatrix& features, std::span<const int> labels,
                     const std::vector<std::string>& class_names, const KmerSet& kmers,
                     const ItemAlphabet& alphabet, std::ostream& out) {
  if (labels.size() != features.rows()) {
    throw ShapeError("export: " + std::to_string(labels.size()) + " labels for " + std::to_string(features.rows()) +
                     " feature rows");
  }
  if (kmers.size() != features.cols()) throw ShapeError("export: k-mer count differs from feature columns");
  out << "label";
  for (const auto& kmer : kmers.kmers()) out << ',' << csv_field(join_tokens(kmer, alphabet, "|"));
  out << '\n';
  for (std::size_t n = 0; n < features.rows(); ++n) {
    out << csv_field(class_names.at(static_cast<std::size_t>(labels[n])));
    for (int v : features.row(n)) out << ',' << v;
    out << '\n';
  }
  if (!out) throw IoError("failed writing feature CSV");
}

void export_features(const FeatureMatrix& features, std::span<const int> labels,
                     const std::vector<std::string>& class_names, const KmerSet& kmers,
                     const ItemAlphabet& alphabet, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  export_features(features, labels, class_names, kmers, alphabet, out);
}

FeatureTable read_features_csv(std::istream& in) {
  FeatureTable table;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("feature CSV is empty");
  auto header = split_csv(line);
  if (header.empty() || header.front() != "label") throw ValidationError("feature CSV must start with a label column");
  table.columns.assign(header.begin() + 1, header.end());
  std::vector<std::vector<int>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw ParseError("<features>", line_no, "expected " + std::to_string(header.size()) + " fields");
    }
    table.labels.push_back(fields.front());
    std::vector<int> row;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      try {
        row.push_back(std::stoi(fields[j]));
      } catch (const std::exception&) {
        throw ParseError("<features>", line_no, "non-integer value '" + fields[j] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  table.values = FeatureMatrix(rows.size(), table.columns.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) table.values(r, c) = rows[r][c];
  }
  return table;
}

}  // namespace hamenc
