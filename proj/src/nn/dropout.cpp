#include "gridcast/nn/dropout.hpp"

#include "gridcast/error.hpp"

namespace gridcast::nn {

Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) throw Error(Errc::InvalidArgument, "dropout rate must lie in [0, 1)");
    Matrix mask(rows, cols, 1.0);
    if (rate == 0.0) return mask;
    for (double& m : mask.flat()) m = rng.bernoulli(rate) ? 0.0 : 1.0;
    return mask;
}

DropoutResult apply_dropout(const Matrix& x, const DropoutSpec& spec, Rng& rng) {
    if (spec.mode == Mode::Eval || spec.rate == 0.0) {
        if (!(spec.rate >= 0.0 && spec.rate < 1.0))
            throw Error(Errc::InvalidArgument, "dropout rate must lie in [0, 1)");
        return {x, Matrix(x.rows(), x.cols(), 1.0)};
    }
    DropoutResult r{Matrix(x.rows(), x.cols()), dropout_mask(x.rows(), x.cols(), spec.rate, rng)};
    const double scale = 1.0 / (1.0 - spec.rate);
    const auto in = x.flat();
    const auto mask = r.mask.flat();
    auto out = r.output.flat();
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * mask[i] * scale;
    return r;
}

}  // namespace gridcast::nn
