#pragma once

#include <string_view>

#include "hamenc/tensor.hpp"

namespace hamenc {

/// Weight binarization applied to the convolution kernels on every forward pass.
///
///  - hamming:   1 at each column's argmax row, 0 elsewhere. Each kernel then
///               reads as a k-mer.
///  - heaviside: x >= 0 -> 1, else 0.
///  - sign:      x >= 0 -> +1, else -1.
///  - none:      identity (full-precision baseline).
enum class QuantizerKind { hamming, heaviside, sign, none };

std::string_view to_string(QuantizerKind kind);

/// Throws ValidationError for anything but the four lower-case names.
QuantizerKind parse_quantizer(std::string_view name);

/// Column-wise argmax one-hot of an [m x k] kernel. Ties go to the lowest row.
Matrix quantize_hamming(const Matrix& w);
Matrix quantize_heaviside(const Matrix& w);
Matrix quantize_sign(const Matrix& w);
Matrix quantize(QuantizerKind kind, const Matrix& w);

/// Applies `kind` to every [m x k] kernel of a [K x m x k] weight tensor.
Tensor3 quantize_kernels(QuantizerKind kind, const Tensor3& w);

/// Straight-through estimator: the real weights receive the gradient computed
/// for their binarized copy, unchanged.
inline Tensor3 ste_passthrough(Tensor3 grad_wb) { return grad_wb; }

}  // namespace hamenc
