#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "hamenc/encoder.hpp"
#include "hamenc/error.hpp"

// Layout (all integers little-endian):
//   "HAMMENC"            7 bytes
//   u32 version          = 1
//   u32 quantizer        0 hamming, 1 heaviside, 2 sign, 3 none
//   u64 k, K, m, d, padded_width
//   m strings, d strings  each u64 byte length + bytes
//   K*m*k f64            conv weights, row-major [K][m][k]
//   d*K f64              dense weights, row-major [d][K]

namespace hamenc {
namespace {

constexpr std::array<char, 7> kMagic{'H', 'A', 'M', 'M', 'E', 'N', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxString = 1u << 20;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }

 private:
  void le(std::uint64_t v, int bytes) {
    char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, bytes);
  }
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str() {
    const auto n = u64();
    if (n > kMaxString) throw ValidationError("model file: string length " + std::to_string(n) + " is implausible");
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  void read(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw ValidationError("model file is truncated");
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::uint64_t le(int bytes) {
    unsigned char buf[8];
    read(reinterpret_cast<char*>(buf), static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{buf[i]} << (8 * i);
    return v;
  }
  std::istream& in_;
};

std::uint32_t quantizer_code(QuantizerKind kind) {
  switch (kind) {
    case QuantizerKind::hamming: return 0;
    case QuantizerKind::heaviside: return 1;
    case QuantizerKind::sign: return 2;
    case QuantizerKind::none: return 3;
  }
  return 0;
}

QuantizerKind quantizer_from_code(std::uint32_t code) {
  switch (code) {
    case 0: return QuantizerKind::hamming;
    case 1: return QuantizerKind::heaviside;
    case 2: return QuantizerKind::sign;
    case 3: return QuantizerKind::none;
    default: throw ValidationError("model file: unknown quantizer code " + std::to_string(code));
  }
}

}  // namespace

void save_model(const EncoderModel& model, std::ostream& out) {
  model.validate();
  Writer w(out);
  w.raw(kMagic.data(), kMagic.size());
  w.u32(kVersion);
  w.u32(quantizer_code(model.quantizer));
  w.u64(model.kmer_length());
  w.u64(model.kernel_count());
  w.u64(model.alphabet_size());
  w.u64(model.num_classes());
  w.u64(model.padded_width);
  for (const auto& s : model.alphabet.symbols()) w.str(s);
  for (const auto& s : model.class_names) w.str(s);
  for (double v : model.conv_weights.values()) w.f64(v);
  for (double v : model.dense_weights.values()) w.f64(v);
  if (!out) throw IoError("failed writing model");
}

void save_model(const EncoderModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  save_model(model, out);
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

EncoderModel load_model(std::istream& in) {
  Reader r(in);
  std::array<char, 7> magic{};
  r.read(magic.data(), magic.size());
  if (magic != kMagic) throw ValidationError("not a model file (bad magic)");
  const auto version = r.u32();
  if (version != kVersion) {
    throw ValidationError("unsupported model format version " + std::to_string(version) + " (expected " +
                          std::to_string(kVersion) + ")");
  }
  EncoderModel model;
  model.quantizer = quantizer_from_code(r.u32());
  const auto k = r.u64();
  const auto kernels = r.u64();
  const auto m = r.u64();
  const auto d = r.u64();
  model.padded_width = r.u64();
  if (k == 0 || kernels == 0 || m == 0 || d == 0) throw ValidationError("model file: zero dimension");
  if (k > kMaxElements || kernels > kMaxElements || m > kMaxElements || d > kMaxElements ||
      kernels * m > kMaxElements / k || d > kMaxElements / kernels) {
    throw ValidationError("model file: implausible dimensions");
  }
  std::vector<std::string> symbols;
  for (std::uint64_t i = 0; i < m; ++i) symbols.push_back(r.str());
  model.alphabet = ItemAlphabet(std::move(symbols));
  for (std::uint64_t i = 0; i < d; ++i) model.class_names.push_back(r.str());
  if (std::set<std::string>(model.class_names.begin(), model.class_names.end()).size() != d) {
    throw ValidationError("model file: duplicate class name");
  }
  model.conv_weights = Tensor3(kernels, m, k);
  for (auto& v : model.conv_weights.values()) v = r.f64();
  model.dense_weights = Matrix(d, kernels);
  for (auto& v : model.dense_weights.values()) v = r.f64();
  if (!r.at_end()) throw ValidationError("model file has trailing bytes");
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::ranges::all_of(model.conv_weights.values(), finite) ||
      !std::ranges::all_of(model.dense_weights.values(), finite)) {
    throw ValidationError("model file: non-finite weight");
  }
  model.validate();
  return model;
}

EncoderModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model '" + path.string() + "'");
  return load_model(in);
}

}  // namespace hamenc
