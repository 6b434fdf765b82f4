#pragma once

#include "hamenc/data.hpp"
#include "hamenc/encoder.hpp"
#include "hamenc/error.hpp"
#include "hamenc/eval.hpp"
#include "hamenc/features.hpp"
#include "hamenc/kmer_set.hpp"
#include "hamenc/nn.hpp"
#include "hamenc/quantize.hpp"
#include "hamenc/tensor.hpp"
