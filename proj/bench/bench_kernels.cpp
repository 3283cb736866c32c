// Serial reference vs OpenMP chunked kernels for one minibatch gradient.

#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "gridcast/models.hpp"

using namespace gridcast;

namespace {

struct Batch {
    Matrix x;
    std::vector<double> y;
    std::vector<std::size_t> idx;
};

Batch make_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    nn::Rng rng(seed);
    Batch b{Matrix(rows, cols), std::vector<double>(rows), std::vector<std::size_t>(rows)};
    for (auto& v : b.x.flat()) v = rng.uniform();
    for (auto& v : b.y) v = rng.uniform();
    std::iota(b.idx.begin(), b.idx.end(), std::size_t{0});
    return b;
}

template <class Model>
void run(benchmark::State& state, const Model& model, const Batch& batch, nn::Exec exec) {
    std::vector<double> grad(model.param_count());
    nn::Rng rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.loss_and_gradient(batch.x, batch.y, batch.idx, grad, rng, exec));
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(batch.idx.size()));
}

void BM_LstmGradient(benchmark::State& state) {
    nn::Rng init(1);
    const models::LstmNet model(models::LstmSpec{}, init);
    const auto batch = make_batch(static_cast<std::size_t>(state.range(1)), 24, 2);
    run(state, model, batch, state.range(0) == 0 ? nn::Exec::Serial : nn::Exec::Parallel);
}

void BM_MlpGradient(benchmark::State& state) {
    nn::Rng init(1);
    const models::Mlp model(models::MlpSpec{}, init);
    const auto batch = make_batch(static_cast<std::size_t>(state.range(1)), prep::kStaticFeatures, 2);
    run(state, model, batch, state.range(0) == 0 ? nn::Exec::Serial : nn::Exec::Parallel);
}

void BM_LstmPredict(benchmark::State& state) {
    nn::Rng init(1);
    const models::LstmNet model(models::LstmSpec{}, init);
    const auto batch = make_batch(static_cast<std::size_t>(state.range(0)), 24, 2);
    for (auto _ : state) benchmark::DoNotOptimize(model.predict(batch.x));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

// First argument: 0 = serial reference, 1 = parallel kernel. Second: batch size.
BENCHMARK(BM_LstmGradient)->ArgNames({"parallel", "batch"})->ArgsProduct({{0, 1}, {256}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MlpGradient)->ArgNames({"parallel", "batch"})->ArgsProduct({{0, 1}, {256}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LstmPredict)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
