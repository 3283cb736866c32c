#include "gradcheck.hpp"
#include "gridcast/nn/dense.hpp"
#include "gridcast/nn/lstm.hpp"

using namespace gridcast;
using namespace gridcast::nn;
using testing::Gen;

TEST_SUITE("gradcheck") {

TEST_CASE("dense layer gradients, parameters and inputs") {
    testing::for_all(10, [](Gen& g) {
        for (Activation act : {Activation::Identity, Activation::Relu, Activation::Tanh, Activation::Sigmoid}) {
            const DenseLayer layer(3, 4, act);
            const auto p = g.vec(layer.param_count());
            const auto x = g.matrix(5, 3);
            const auto w = g.matrix(5, 4);  // loss = sum(w * y)
            DenseCache cache;
            dense_forward(layer, p, x, &cache);
            std::vector<double> grad(layer.param_count(), 0.0);
            const auto dx = dense_backward(layer, p, cache, w, grad);

            const auto loss_p = [&](const std::vector<double>& q) {
                const auto y = dense_forward(layer, q, x);
                double s = 0;
                for (std::size_t i = 0; i < y.flat().size(); ++i) s += y.flat()[i] * w.flat()[i];
                return s;
            };
            CHECK(testing::max_relative_error(grad, testing::numeric_gradient(p, loss_p)) < 1e-4);

            const std::vector<double> x0(x.flat().begin(), x.flat().end());
            const auto loss_x = [&](const std::vector<double>& q) {
                const auto y = dense_forward(layer, p, Matrix(5, 3, q));
                double s = 0;
                for (std::size_t i = 0; i < y.flat().size(); ++i) s += y.flat()[i] * w.flat()[i];
                return s;
            };
            const std::vector<double> dx_flat(dx.flat().begin(), dx.flat().end());
            CHECK(testing::max_relative_error(dx_flat, testing::numeric_gradient(x0, loss_x)) < 1e-4);
        }
    });
}

TEST_CASE("lstm backprop through time, parameters and inputs") {
    testing::for_all(10, [](Gen& g) {
        for (Activation act : {Activation::Tanh, Activation::Relu}) {
            const LstmCell cell(2, 3, act);
            const auto p = g.vec(cell.param_count());
            const auto seq = g.matrix(6, 2);
            const auto w = g.vec(3);  // loss = w . h_L
            LstmCache cache;
            lstm_forward(cell, p, seq, &cache);
            std::vector<double> grad(cell.param_count(), 0.0);
            Matrix dseq;
            lstm_backward(cell, p, cache, w, grad, &dseq);

            const auto loss = [&](std::span<const double> q, const Matrix& s) {
                const auto h = lstm_forward(cell, q, s);
                double v = 0;
                for (std::size_t j = 0; j < 3; ++j) v += w[j] * h[j];
                return v;
            };
            CHECK(testing::max_relative_error(
                      grad, testing::numeric_gradient(p, [&](const std::vector<double>& q) { return loss(q, seq); })) <
                  1e-4);
            const std::vector<double> s0(seq.flat().begin(), seq.flat().end());
            const std::vector<double> ds(dseq.flat().begin(), dseq.flat().end());
            CHECK(testing::max_relative_error(
                      ds, testing::numeric_gradient(
                              s0, [&](const std::vector<double>& q) { return loss(p, Matrix(6, 2, q)); })) < 1e-4);
        }
    });
}

TEST_CASE("mlp 7-4-3-1 batch gradient, 10 seeds, both execution paths") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        for (Exec exec : {Exec::Serial, Exec::Parallel}) {
            CAPTURE(seed);
            CHECK(testing::mlp_gradcheck_seed(seed, exec) < 1e-4);
        }
}

TEST_CASE("lstm H=4 L=5 batch gradient, 10 seeds, tanh and relu, both execution paths") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        for (Activation act : {Activation::Tanh, Activation::Relu})
            for (Exec exec : {Exec::Serial, Exec::Parallel}) {
                CAPTURE(seed);
                CHECK(testing::lstm_gradcheck_seed(seed, act, exec) < 1e-4);
            }
}

TEST_CASE("zero-residual batch has zero gradient") {
    const models::Mlp mlp(models::MlpSpec{});
    const models::LstmNet lstm(models::LstmSpec{});
    Gen g(2);
    std::vector<std::size_t> idx{0, 1, 2, 3};
    Rng rng(1);
    for (Exec exec : {Exec::Serial, Exec::Parallel}) {
        std::vector<double> grad(mlp.param_count(), 1.0);
        CHECK(mlp.loss_and_gradient(g.matrix(4, 7), std::vector<double>(4, 0.0), idx, grad, rng, exec) == 0.0);
        for (double v : grad) CHECK(v == 0.0);
        std::vector<double> grad2(lstm.param_count(), 1.0);
        CHECK(lstm.loss_and_gradient(g.matrix(4, 24), std::vector<double>(4, 0.0), idx, grad2, rng, exec) == 0.0);
        for (double v : grad2) CHECK(v == 0.0);
    }
}

}
