#include "hamenc/quantize.hpp"

#include <cmath>
#include <span>
#include <string>

#include "hamenc/error.hpp"

namespace hamenc {
namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError("quantizer input holds a non-finite weight");
  }
}

// One [m x k] kernel stored row-major in `src`.
void hamming_kernel(std::span<const double> src, std::span<double> dst, std::size_t m, std::size_t k) {
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i) {
      if (src[i * k + j] > src[best * k + j]) best = i;
    }
    for (std::size_t i = 0; i < m; ++i) dst[i * k + j] = i == best ? 1.0 : 0.0;
  }
}

template <typename Fn>
void elementwise(std::span<const double> src, std::span<double> dst, Fn fn) {
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = fn(src[i]);
}

}  // namespace

std::string_view to_string(QuantizerKind kind) {
  switch (kind) {
    case QuantizerKind::hamming: return "hamming";
    case QuantizerKind::heaviside: return "heaviside";
    case QuantizerKind::sign: return "sign";
    case QuantizerKind::none: return "none";
  }
  return "unknown";
}

QuantizerKind parse_quantizer(std::string_view name) {
  if (name == "hamming") return QuantizerKind::hamming;
  if (name == "heaviside") return QuantizerKind::heaviside;
  if (name == "sign") return QuantizerKind::sign;
  if (name == "none") return QuantizerKind::none;
  throw ValidationError("unknown quantizer '" + std::string(name) + "'");
}

Matrix quantize_hamming(const Matrix& w) {
  if (w.rows() == 0) throw ValidationError("hamming quantizer needs at least one row");
  require_finite(w.values());
  Matrix out(w.rows(), w.cols());
  hamming_kernel(w.values(), out.values(), w.rows(), w.cols());
  return out;
}

Matrix quantize_heaviside(const Matrix& w) {
  require_finite(w.values());
  Matrix out(w.rows(), w.cols());
  elementwise(w.values(), out.values(), [](double x) { return x >= 0.0 ? 1.0 : 0.0; });
  return out;
}

Matrix quantize_sign(const Matrix& w) {
  require_finite(w.values());
  Matrix out(w.rows(), w.cols());
  elementwise(w.values(), out.values(), [](double x) { return x >= 0.0 ? 1.0 : -1.0; });
  return out;
}

Matrix quantize(QuantizerKind kind, const Matrix& w) {
  switch (kind) {
    case QuantizerKind::hamming: return quantize_hamming(w);
    case QuantizerKind::heaviside: return quantize_heaviside(w);
    case QuantizerKind::sign: return quantize_sign(w);
    case QuantizerKind::none: require_finite(w.values()); return w;
  }
  throw UnsupportedError("unhandled quantizer kind");
}

Tensor3 quantize_kernels(QuantizerKind kind, const Tensor3& w) {
  require_finite(w.values());
  if (kind == QuantizerKind::none) return w;
  Tensor3 out(w.dim0(), w.dim1(), w.dim2());
  switch (kind) {
    case QuantizerKind::hamming:
      if (w.dim1() == 0) throw ValidationError("hamming quantizer needs at least one row");
      for (std::size_t c = 0; c < w.dim0(); ++c) hamming_kernel(w.slice(c), out.slice(c), w.dim1(), w.dim2());
      break;
    case QuantizerKind::heaviside:
      elementwise(w.values(), out.values(), [](double x) { return x >= 0.0 ? 1.0 : 0.0; });
      break;
    case QuantizerKind::sign:
      elementwise(w.values(), out.values(), [](double x) { return x >= 0.0 ? 1.0 : -1.0; });
      break;
    case QuantizerKind::none:
      break;
  }
  return out;
}

}  // namespace hamenc
