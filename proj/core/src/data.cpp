#include "hamenc/data.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hamenc/error.hpp"

namespace hamenc {

// --- ItemAlphabet ----------------------------------------------------------

ItemAlphabet::ItemAlphabet(std::vector<std::string> symbols) {
  for (auto& s : symbols) {
    if (find(s)) throw ValidationError("duplicate alphabet symbol '" + s + "'");
    add(s);
  }
}

Item ItemAlphabet::add(std::string_view token) {
  std::string key(token);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  auto index = static_cast<Item>(symbols_.size());
  index_.emplace(key, index);
  symbols_.push_back(std::move(key));
  return index;
}

std::optional<Item> ItemAlphabet::find(std::string_view token) const {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
  return std::nullopt;
}

const std::string& ItemAlphabet::symbol(Item index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= symbols_.size()) {
    throw ValidationError("item index " + std::to_string(index) + " outside alphabet of size " +
                          std::to_string(symbols_.size()));
  }
  return symbols_[static_cast<std::size_t>(index)];
}

std::string ItemAlphabet::render(Item index) const {
  if (index == kPadItem) return "<pad>";
  if (index == kUnknownItem) return "<unk>";
  return symbol(index);
}

// --- LabeledSequenceDataset -----------------------------------------------

std::size_t LabeledSequenceDataset::max_length() const noexcept {
  std::size_t longest = 0;
  for (const auto& r : records) longest = std::max(longest, r.items.size());
  return longest;
}

std::vector<Sequence> LabeledSequenceDataset::sequences() const {
  std::vector<Sequence> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.items);
  return out;
}

std::vector<int> LabeledSequenceDataset::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

std::vector<std::size_t> LabeledSequenceDataset::class_counts() const {
  std::vector<std::size_t> counts(class_names.size(), 0);
  for (const auto& r : records) {
    if (r.label >= 0 && static_cast<std::size_t>(r.label) < counts.size()) ++counts[r.label];
  }
  return counts;
}

LabeledSequenceDataset LabeledSequenceDataset::subset(std::span<const std::size_t> indices) const {
  LabeledSequenceDataset out;
  out.class_names = class_names;
  out.alphabet = alphabet;
  out.records.reserve(indices.size());
  for (auto i : indices) out.records.push_back(records.at(i));
  return out;
}

void LabeledSequenceDataset::validate() const {
  const auto m = static_cast<Item>(alphabet.size());
  const auto d = static_cast<int>(class_names.size());
  if (d < 2) throw ValidationError("dataset needs at least two classes, found " + std::to_string(d));
  for (std::size_t n = 0; n < records.size(); ++n) {
    const auto& r = records[n];
    if (r.items.empty()) throw ValidationError("record " + std::to_string(n) + " has an empty sequence");
    if (r.label < 0 || r.label >= d) {
      throw ValidationError("record " + std::to_string(n) + " has label " + std::to_string(r.label) +
                            " outside [0, " + std::to_string(d) + ")");
    }
    for (auto item : r.items) {
      if (item >= m || (item < 0 && item != kUnknownItem)) {
        throw ValidationError("record " + std::to_string(n) + " has item " + std::to_string(item) +
                              " outside alphabet of size " + std::to_string(m));
      }
    }
  }
  auto counts = class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) throw ValidationError("class '" + class_names[c] + "' has no records");
  }
}

// --- TSV -------------------------------------------------------------------

LabeledSequenceDataset parse_dataset(std::istream& in, const std::string& source) {
  LabeledSequenceDataset ds;
  std::unordered_map<std::string, int> class_index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') continue;

    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, line_no, "missing tab between label and sequence");
    std::string label = line.substr(0, tab);
    if (label.empty()) throw ParseError(source, line_no, "empty label");

    Record rec;
    std::istringstream tokens(line.substr(tab + 1));
    std::string tok;
    while (tokens >> tok) rec.items.push_back(ds.alphabet.add(tok));
    if (rec.items.empty()) throw ParseError(source, line_no, "empty sequence");

    auto [it, inserted] = class_index.emplace(label, static_cast<int>(ds.class_names.size()));
    if (inserted) ds.class_names.push_back(label);
    rec.label = it->second;
    ds.records.push_back(std::move(rec));
  }
  if (in.bad()) throw IoError("read failure on " + source);
  ds.validate();
  return ds;
}

LabeledSequenceDataset parse_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  return parse_dataset(in, path.string());
}

void write_dataset(const LabeledSequenceDataset& dataset, std::ostream& out) {
  for (const auto& r : dataset.records) {
    out << dataset.class_names.at(r.label) << '\t';
    for (std::size_t j = 0; j < r.items.size(); ++j) {
      if (j) out << ' ';
      out << dataset.alphabet.symbol(r.items[j]);
    }
    out << '\n';
  }
}

void write_dataset(const LabeledSequenceDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_dataset(dataset, out);
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

Sequence reindex(const Sequence& sequence, const ItemAlphabet& from, const ItemAlphabet& to) {
  Sequence out;
  out.reserve(sequence.size());
  for (auto item : sequence) {
    if (item < 0) {
      out.push_back(item);
      continue;
    }
    auto mapped = to.find(from.symbol(item));
    out.push_back(mapped ? *mapped : kUnknownItem);
  }
  return out;
}

LabeledSequenceDataset conform(const LabeledSequenceDataset& dataset, const ItemAlphabet& alphabet,
                               const std::vector<std::string>& class_names) {
  LabeledSequenceDataset out;
  out.alphabet = alphabet;
  out.class_names = class_names;
  std::vector<int> label_map(dataset.class_names.size());
  for (std::size_t c = 0; c < dataset.class_names.size(); ++c) {
    auto it = std::find(class_names.begin(), class_names.end(), dataset.class_names[c]);
    if (it == class_names.end()) {
      throw ValidationError("class '" + dataset.class_names[c] + "' is not known to the model");
    }
    label_map[c] = static_cast<int>(it - class_names.begin());
  }
  out.records.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    out.records.push_back({reindex(r.items, dataset.alphabet, alphabet), label_map.at(r.label)});
  }
  return out;
}

// --- one-hot ---------------------------------------------------------------

OneHotBatch::OneHotBatch(std::size_t batch_size, std::size_t alphabet_size, std::size_t width)
    : batch_(batch_size),
      alphabet_(alphabet_size),
      width_(width),
      tensor_(batch_size * alphabet_size * width, 0),
      items_(batch_size * width, kPadItem),
      lengths_(batch_size, 0) {}

std::vector<std::uint8_t> OneHotBatch::column(std::size_t n, std::size_t j) const {
  std::vector<std::uint8_t> col(alphabet_);
  for (std::size_t i = 0; i < alphabet_; ++i) col[i] = at(n, i, j);
  return col;
}

OneHotBatch one_hot_encode(std::span<const Sequence> sequences, std::size_t alphabet_size,
                           std::size_t width) {
  OneHotBatch batch(sequences.size(), alphabet_size, width);
  const auto m = static_cast<Item>(alphabet_size);
  for (std::size_t n = 0; n < sequences.size(); ++n) {
    const auto& s = sequences[n];
    if (s.size() > width) {
      throw ValidationError("padded width " + std::to_string(width) + " is shorter than sequence " +
                            std::to_string(n) + " of length " + std::to_string(s.size()));
    }
    batch.lengths_[n] = s.size();
    for (std::size_t j = 0; j < s.size(); ++j) {
      const Item item = s[j];
      if (item == kPadItem || item == kUnknownItem) continue;
      if (item < 0 || item >= m) {
        throw ValidationError("item index " + std::to_string(item) + " outside alphabet of size " +
                              std::to_string(alphabet_size));
      }
      batch.tensor_[(n * alphabet_size + static_cast<std::size_t>(item)) * width + j] = 1;
      batch.items_[n * width + j] = item;
    }
  }
  return batch;
}

std::optional<Item> inverse_one_hot_index(std::span<const std::uint8_t> column) {
  std::optional<Item> found;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column[i] == 0) continue;
    if (column[i] != 1) throw ValidationError("one-hot column holds a non-binary value");
    if (found) throw ValidationError("one-hot column has more than one active row");
    found = static_cast<Item>(i);
  }
  return found;
}

std::optional<std::string> inverse_one_hot(std::span<const std::uint8_t> column,
                                           const ItemAlphabet& alphabet) {
  if (column.size() != alphabet.size()) {
    throw ShapeError("column has " + std::to_string(column.size()) + " rows, alphabet has " +
                     std::to_string(alphabet.size()));
  }
  auto index = inverse_one_hot_index(column);
  if (!index) return std::nullopt;
  return alphabet.symbol(*index);
}

}  // namespace hamenc
