#include <omp.h>

#include "gradcheck.hpp"
#include "gridcast/nn/kernels.hpp"

using namespace gridcast;
using namespace gridcast::nn;
using testing::Gen;

namespace {

template <class Model>
std::pair<double, std::vector<double>> batch_gradient(const Model& m, const Matrix& x, const std::vector<double>& y,
                                                      Exec exec, std::uint64_t mask_seed) {
    std::vector<std::size_t> idx(y.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<double> grad(m.param_count());
    Rng rng(mask_seed);
    const double loss = m.loss_and_gradient(x, y, idx, grad, rng, exec);
    return {loss, grad};
}

/// Max-norm distance relative to the max-norm of the reference. The two paths
/// sum in different orders, so single coordinates that cancel to near zero
/// carry round-off well above their own magnitude.
void check_close(const std::vector<double>& ref, const std::vector<double>& b, double tol) {
    REQUIRE(ref.size() == b.size());
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        diff = std::max(diff, std::abs(ref[i] - b[i]));
        scale = std::max(scale, std::abs(ref[i]));
    }
    CHECK(diff <= tol * scale);
}

class ThreadCount {
public:
    explicit ThreadCount(int n) : saved_(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~ThreadCount() { omp_set_num_threads(saved_); }

private:
    int saved_;
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("parallel lstm gradient agrees with the serial reference") {
    testing::for_all(5, [](Gen& g) {
        const std::size_t B = g.size(1, 70);
        Rng init(g.size(1, 1000));
        const models::LstmNet net(models::LstmSpec{}, init);
        const auto x = g.matrix(B, 24, 0, 1);
        const auto y = g.vec(B, 0, 1);
        const auto [ls, gs] = batch_gradient(net, x, y, Exec::Serial, 3);
        const auto [lp, gp] = batch_gradient(net, x, y, Exec::Parallel, 3);
        CHECK(lp == doctest::Approx(ls).epsilon(1e-12));
        check_close(gs, gp, 1e-12);
    });
}

TEST_CASE("parallel mlp gradient agrees with the serial reference") {
    testing::for_all(5, [](Gen& g) {
        const std::size_t B = g.size(1, 300);
        Rng init(g.size(1, 1000));
        const models::Mlp net(models::MlpSpec{}, init);
        const auto x = g.matrix(B, 7, 0, 1);
        const auto y = g.vec(B, 0, 1);
        const auto [ls, gs] = batch_gradient(net, x, y, Exec::Serial, 4);
        const auto [lp, gp] = batch_gradient(net, x, y, Exec::Parallel, 4);
        CHECK(lp == doctest::Approx(ls).epsilon(1e-12));
        check_close(gs, gp, 1e-12);
    });
}

TEST_CASE("parallel results do not depend on the thread count") {
    Gen g(9);
    Rng init(1);
    const models::LstmNet lstm(models::LstmSpec{}, init);
    const models::Mlp mlp(models::MlpSpec{}, init);
    const auto xs = g.matrix(100, 24, 0, 1);
    const auto xm = g.matrix(100, 7, 0, 1);
    const auto y = g.vec(100, 0, 1);
    std::vector<std::vector<double>> lstm_grads, mlp_grads, preds;
    for (int threads : {1, 2, 3, 8}) {
        ThreadCount tc(threads);
        lstm_grads.push_back(batch_gradient(lstm, xs, y, Exec::Parallel, 5).second);
        mlp_grads.push_back(batch_gradient(mlp, xm, y, Exec::Parallel, 5).second);
        preds.push_back(lstm.predict(xs));
    }
    for (std::size_t i = 1; i < lstm_grads.size(); ++i) {
        CHECK(lstm_grads[i] == lstm_grads[0]);
        CHECK(mlp_grads[i] == mlp_grads[0]);
        CHECK(preds[i] == preds[0]);
    }
}

TEST_CASE("chunk reduction sums in chunk order") {
    const std::size_t n = 5 * kReductionChunk + 3;
    std::vector<double> grad(2, 0.0);
    const double loss = parallel_chunk_reduce(n, grad, [](std::size_t b, std::size_t e, std::span<double> g) {
        for (std::size_t i = b; i < e; ++i) {
            g[0] += 1.0;
            g[1] += static_cast<double>(i);
        }
        return static_cast<double>(e - b);
    });
    CHECK(loss == static_cast<double>(n));
    CHECK(grad[0] == static_cast<double>(n));
    CHECK(grad[1] == static_cast<double>(n * (n - 1) / 2));
}

TEST_CASE("sequence kernel forward matches the reference cell") {
    testing::for_all(10, [](Gen& g) {
        const LstmCell cell(g.size(1, 3), g.size(1, 8), g.coin() ? Activation::Tanh : Activation::Relu);
        const auto p = g.vec(cell.param_count());
        const std::size_t L = g.size(1, 10);
        const auto seq = g.matrix(L, cell.input());
        const LstmSequenceKernel kernel(cell, p);
        auto ws = kernel.make_workspace(L);
        const auto h = kernel.forward(seq.flat(), ws);
        const auto ref = lstm_forward(cell, p, seq);
        for (std::size_t j = 0; j < cell.hidden(); ++j) CHECK(h[j] == doctest::Approx(ref[j]).epsilon(1e-12));
    });
}

TEST_CASE("lstm predictions are invariant to batch partitioning") {
    Gen g(2);
    Rng init(4);
    const models::LstmNet net(models::LstmSpec{}, init);
    const auto x = g.matrix(70, 24, 0, 1);
    const auto whole = net.predict(x);
    std::vector<double> parts;
    for (std::size_t b = 0; b < 7; ++b) {
        Matrix chunk(10, 24);
        for (std::size_t r = 0; r < 10; ++r)
            std::copy(x.row(b * 10 + r).begin(), x.row(b * 10 + r).end(), chunk.row(r).begin());
        const auto p = net.predict(chunk);
        parts.insert(parts.end(), p.begin(), p.end());
    }
    CHECK(parts == whole);
}

}
