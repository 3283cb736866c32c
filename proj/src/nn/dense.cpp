#include "gridcast/nn/dense.hpp"

#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::nn {

double glorot_limit(std::size_t fan_in, std::size_t fan_out) noexcept {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void DenseLayer::initialize(std::span<double> p, Rng& rng) const {
    const double limit = glorot_limit(in_, out_);
    for (std::size_t i = 0; i < out_ * in_; ++i) p[i] = rng.uniform(-limit, limit);
    for (std::size_t i = out_ * in_; i < param_count(); ++i) p[i] = 0.0;
}

void DenseLayer::forward(std::span<const double> p, std::span<const double> x, std::span<double> pre,
                         std::span<double> y) const {
    const double* w = p.data();
    const double* b = p.data() + out_ * in_;
    for (std::size_t o = 0; o < out_; ++o) {
        const double* wr = w + o * in_;
        double z = b[o];
        for (std::size_t k = 0; k < in_; ++k) z += wr[k] * x[k];
        pre[o] = z;
        y[o] = activate(act_, z);
    }
}

void DenseLayer::backward(std::span<const double> p, std::span<const double> x, std::span<const double> pre,
                          std::span<const double> y, std::span<const double> dy, std::span<double> grad,
                          std::span<double> dx) const {
    const double* w = p.data();
    double* gw = grad.data();
    double* gb = grad.data() + out_ * in_;
    if (!dx.empty())
        for (std::size_t k = 0; k < in_; ++k) dx[k] = 0.0;
    for (std::size_t o = 0; o < out_; ++o) {
        const double dz = dy[o] * activate_grad(act_, pre[o], y[o]);
        if (dz == 0.0) continue;
        gb[o] += dz;
        double* gr = gw + o * in_;
        for (std::size_t k = 0; k < in_; ++k) gr[k] += dz * x[k];
        if (!dx.empty()) {
            const double* wr = w + o * in_;
            for (std::size_t k = 0; k < in_; ++k) dx[k] += dz * wr[k];
        }
    }
}

Matrix dense_forward(const DenseLayer& layer, std::span<const double> p, const Matrix& x, DenseCache* cache) {
    if (x.cols() != layer.in())
        throw Error(Errc::ShapeMismatch, "dense input has " + std::to_string(x.cols()) + " columns, layer expects " +
                                             std::to_string(layer.in()));
    if (p.size() != layer.param_count()) throw Error(Errc::ShapeMismatch, "dense parameter span size mismatch");
    Matrix pre(x.rows(), layer.out());
    Matrix y(x.rows(), layer.out());
    for (std::size_t r = 0; r < x.rows(); ++r) layer.forward(p, x.row(r), pre.row(r), y.row(r));
    if (cache) {
        cache->input = x;
        cache->pre = std::move(pre);
        cache->output = y;
        cache->valid = true;
    }
    return y;
}

Matrix dense_backward(const DenseLayer& layer, std::span<const double> p, const DenseCache& cache,
                      const Matrix& dy, std::span<double> grad) {
    if (!cache.valid) throw Error(Errc::NoCachedForward, "dense_backward called without a cached forward pass");
    if (dy.rows() != cache.output.rows() || dy.cols() != layer.out())
        throw Error(Errc::ShapeMismatch, "upstream gradient shape does not match layer output");
    if (grad.size() != layer.param_count()) throw Error(Errc::ShapeMismatch, "gradient span size mismatch");
    Matrix dx(dy.rows(), layer.in());
    for (std::size_t r = 0; r < dy.rows(); ++r)
        layer.backward(p, cache.input.row(r), cache.pre.row(r), cache.output.row(r), dy.row(r), grad, dx.row(r));
    return dx;
}

}  // namespace gridcast::nn
