#pragma once

#include "gridcast/matrix.hpp"
#include "gridcast/nn/rng.hpp"

namespace gridcast::nn {

enum class Mode { Train, Eval };

struct DropoutSpec {
    double rate = 0.0;  // in [0, 1)
    Mode mode = Mode::Train;
};

struct DropoutResult {
    Matrix output;
    Matrix mask;  // 1 = kept, 0 = dropped
};

/// Bernoulli keep-mask with P(drop) = rate.
Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng);

/// Inverted dropout: survivors scaled by 1/(1-p). Eval mode is the identity
/// and leaves the rng untouched.
DropoutResult apply_dropout(const Matrix& x, const DropoutSpec& spec, Rng& rng);

}  // namespace gridcast::nn
