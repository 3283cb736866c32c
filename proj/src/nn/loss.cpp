#include "gridcast/nn/loss.hpp"

#include "gridcast/error.hpp"

namespace gridcast::nn {

LossGrad mse_loss(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw Error(Errc::LengthMismatch, "prediction and target lengths differ");
    if (pred.empty()) throw Error(Errc::EmptyInput, "mse of zero samples");
    const double n = static_cast<double>(pred.size());
    LossGrad out{0.0, std::vector<double>(pred.size())};
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = pred[i] - target[i];
        out.loss += r * r;
        out.grad[i] = 2.0 * r / n;
    }
    out.loss /= n;
    return out;
}

}  // namespace gridcast::nn
