#pragma once

#include <cstddef>
#include <span>

#include "gridcast/matrix.hpp"
#include "gridcast/nn/activation.hpp"
#include "gridcast/nn/rng.hpp"

namespace gridcast::nn {

/// Fully connected layer. Its parameters live in a caller-owned span laid out
/// as W (out x in, row-major) followed by b (out).
class DenseLayer {
public:
    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out, Activation act) : in_(in), out_(out), act_(act) {}

    std::size_t in() const noexcept { return in_; }
    std::size_t out() const noexcept { return out_; }
    Activation activation() const noexcept { return act_; }
    std::size_t param_count() const noexcept { return out_ * in_ + out_; }

    std::span<const double> weights(std::span<const double> p) const { return p.first(out_ * in_); }
    std::span<const double> bias(std::span<const double> p) const { return p.subspan(out_ * in_, out_); }

    /// Glorot-uniform weights, zero bias.
    void initialize(std::span<double> p, Rng& rng) const;

    /// Single-sample forward: pre = Wx + b, y = act(pre).
    void forward(std::span<const double> p, std::span<const double> x, std::span<double> pre,
                 std::span<double> y) const;

    /// Single-sample backward. Accumulates into `grad` (same layout as p);
    /// writes dL/dx into `dx` when it is non-empty. `dy` is dL/dy.
    void backward(std::span<const double> p, std::span<const double> x, std::span<const double> pre,
                  std::span<const double> y, std::span<const double> dy, std::span<double> grad,
                  std::span<double> dx) const;

private:
    std::size_t in_ = 0;
    std::size_t out_ = 0;
    Activation act_ = Activation::Identity;
};

struct DenseCache {
    Matrix input;
    Matrix pre;
    Matrix output;
    bool valid = false;
};

/// Batch forward over rows of x (B x in) -> B x out. Fills `cache` when given.
Matrix dense_forward(const DenseLayer& layer, std::span<const double> p, const Matrix& x,
                     DenseCache* cache = nullptr);

/// Batch backward from dL/dy (B x out); accumulates into grad and returns dL/dx.
/// Throws Error(NoCachedForward) when the cache was never filled.
Matrix dense_backward(const DenseLayer& layer, std::span<const double> p, const DenseCache& cache,
                      const Matrix& dy, std::span<double> grad);

/// Glorot-uniform limit sqrt(6 / (fan_in + fan_out)).
double glorot_limit(std::size_t fan_in, std::size_t fan_out) noexcept;

}  // namespace gridcast::nn
