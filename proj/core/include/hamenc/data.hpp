#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hamenc {

/// Row index of a token in the one-hot encoding. Negative values are markers
/// that encode as an all-zero column and mismatch every real token.
using Item = std::int32_t;

inline constexpr Item kPadItem = -1;
inline constexpr Item kUnknownItem = -2;

using Sequence = std::vector<Item>;

/// Ordered, duplicate-free set of item tokens. Index order is insertion order.
class ItemAlphabet {
 public:
  ItemAlphabet() = default;
  explicit ItemAlphabet(std::vector<std::string> symbols);

  /// Index of `token`, inserting it at the end if absent.
  Item add(std::string_view token);

  std::optional<Item> find(std::string_view token) const;
  const std::string& symbol(Item index) const;

  /// Like symbol(), but renders the pad and unknown markers as `<pad>` / `<unk>`.
  std::string render(Item index) const;

  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

  bool operator==(const ItemAlphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Item> index_;
};

struct Record {
  Sequence items;
  int label = 0;

  bool operator==(const Record&) const = default;
};

struct LabeledSequenceDataset {
  std::vector<Record> records;
  std::vector<std::string> class_names;
  ItemAlphabet alphabet;

  std::size_t size() const noexcept { return records.size(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::size_t max_length() const noexcept;

  std::vector<Sequence> sequences() const;
  std::vector<int> labels() const;
  std::vector<std::size_t> class_counts() const;

  /// Records at `indices`, in that order. Alphabet and class names are shared.
  LabeledSequenceDataset subset(std::span<const std::size_t> indices) const;

  /// Throws ValidationError unless every item is in range, no sequence is
  /// empty, there are at least two classes and each class occurs.
  void validate() const;
};

/// Reads `label<TAB>tok tok ...` lines. Blank and `#` lines are skipped. The
/// alphabet and class list are built in first-appearance order.
LabeledSequenceDataset parse_dataset(const std::filesystem::path& path);
LabeledSequenceDataset parse_dataset(std::istream& in, const std::string& source = "<stream>");

void write_dataset(const LabeledSequenceDataset& dataset, std::ostream& out);
void write_dataset(const LabeledSequenceDataset& dataset, const std::filesystem::path& path);

/// Re-expresses `sequence` (indexed in `from`) in the `to` alphabet. Tokens
/// missing from `to` become kUnknownItem; markers pass through.
Sequence reindex(const Sequence& sequence, const ItemAlphabet& from, const ItemAlphabet& to);

/// Maps a dataset onto a fixed alphabet and class list, e.g. a trained model's.
/// Unknown tokens become kUnknownItem; an unknown class name is a ValidationError.
LabeledSequenceDataset conform(const LabeledSequenceDataset& dataset, const ItemAlphabet& alphabet,
                               const std::vector<std::string>& class_names);

/// Binary tensor [N x m x L]. Column j of sample n holds a single 1 at the
/// item's row when j < length(n) and the item is real; otherwise it is zero.
class OneHotBatch {
 public:
  OneHotBatch(std::size_t batch_size, std::size_t alphabet_size, std::size_t width);

  std::size_t batch_size() const noexcept { return batch_; }
  std::size_t alphabet_size() const noexcept { return alphabet_; }
  std::size_t width() const noexcept { return width_; }

  std::uint8_t at(std::size_t n, std::size_t i, std::size_t j) const {
    return tensor_[(n * alphabet_ + i) * width_ + j];
  }

  /// Row holding the 1 in column j of sample n, or kPadItem for a zero column.
  Item item_at(std::size_t n, std::size_t j) const { return items_[n * width_ + j]; }

  std::vector<std::uint8_t> column(std::size_t n, std::size_t j) const;
  std::span<const std::size_t> lengths() const noexcept { return lengths_; }
  std::span<const std::uint8_t> values() const noexcept { return tensor_; }

 private:
  friend OneHotBatch one_hot_encode(std::span<const Sequence>, std::size_t, std::size_t);

  std::size_t batch_;
  std::size_t alphabet_;
  std::size_t width_;
  std::vector<std::uint8_t> tensor_;
  std::vector<Item> items_;
  std::vector<std::size_t> lengths_;
};

/// Throws ValidationError when `width` is shorter than a sequence or an item
/// is outside [0, alphabet_size) and not a marker.
OneHotBatch one_hot_encode(std::span<const Sequence> sequences, std::size_t alphabet_size,
                           std::size_t width);

/// Row of the single 1 in `column`, or nullopt for an all-zero column.
std::optional<Item> inverse_one_hot_index(std::span<const std::uint8_t> column);

/// Token at the 1's row, or nullopt (padding) for an all-zero column.
std::optional<std::string> inverse_one_hot(std::span<const std::uint8_t> column,
                                           const ItemAlphabet& alphabet);

// --- synthetic planted-motif data ------------------------------------------

struct PlantedMotifConfig {
  std::size_t alphabet_size = 10;
  std::vector<Sequence> motifs;  // one per class
  std::size_t per_class = 100;
  std::size_t min_length = 30;
  std::size_t max_length = 60;
  double noise = 0.0;
  std::uint64_t seed = 1;
};

struct PlantedMotifResult {
  LabeledSequenceDataset dataset;
  std::vector<std::size_t> motif_offsets;  // per record
  std::size_t corrupted_positions = 0;
  std::size_t motif_positions = 0;
};

/// Symbol name used for generated alphabets: A..Z, a..z, then s52, s53, ...
std::string default_symbol(std::size_t index);

/// Alphabet of `size` default symbols in index order.
ItemAlphabet default_alphabet(std::size_t size);

/// Distinct random motifs of the given length, drawn from `seed`.
std::vector<Sequence> random_motifs(std::size_t count, std::size_t length,
                                    std::size_t alphabet_size, std::uint64_t seed);

/// Uniform background sequences with each class motif planted at a uniform
/// offset, then each motif position corrupted with probability `noise`.
PlantedMotifResult generate_planted_motif_dataset(const PlantedMotifConfig& config);

}  // namespace hamenc
