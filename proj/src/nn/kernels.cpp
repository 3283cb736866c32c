#include "gridcast/nn/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::nn {

namespace {

constexpr double kOne = 1.0;

/// y[0, n) += sum_k a[k] * m[k * ld + (0, n)].
void accumulate_rows(const double* a, std::size_t rows, const double* m, std::size_t ld, double* __restrict y,
                     std::size_t n) {
    for (std::size_t k = 0; k < rows; ++k) {
        const double ak = a[k];
        const double* __restrict mk = m + k * ld;
        for (std::size_t i = 0; i < n; ++i) y[i] += ak * mk[i];
    }
}

/// In-place sigmoid over a contiguous run; written branch-free so it vectorises.
void logistic(double* z, std::size_t n) {
#pragma omp simd
    for (std::size_t i = 0; i < n; ++i) z[i] = 1.0 / (1.0 + std::exp(-z[i]));
}

}  // namespace

std::string_view to_string(Exec e) noexcept { return e == Exec::Serial ? "serial" : "parallel"; }

double parallel_chunk_reduce(std::size_t count, std::span<double> grad, const ChunkFn& fn) {
    const std::size_t chunks = (count + kReductionChunk - 1) / kReductionChunk;
    std::vector<std::vector<double>> partial(chunks);
    std::vector<double> losses(chunks, 0.0);

    const auto n = static_cast<long long>(chunks);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < n; ++c) {
        const auto k = static_cast<std::size_t>(c);
        partial[k].assign(grad.size(), 0.0);
        const std::size_t begin = k * kReductionChunk;
        const std::size_t end = std::min(count, begin + kReductionChunk);
        losses[k] = fn(begin, end, partial[k]);
    }

    double loss = 0.0;
    for (std::size_t k = 0; k < chunks; ++k) {
        loss += losses[k];
        const auto& g = partial[k];
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
    }
    return loss;
}

LstmSequenceKernel::LstmSequenceKernel(const LstmCell& cell, std::span<const double> params) : cell_(cell) {
    if (params.size() != cell.param_count()) throw Error(Errc::ShapeMismatch, "LSTM kernel parameter size mismatch");
    const std::size_t G = 4 * cell.hidden(), X = cell.concat();
    w_.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(cell.weight_count()));
    wt_.resize(X * G);
    for (std::size_t r = 0; r < G; ++r)
        for (std::size_t k = 0; k < X; ++k) wt_[k * G + r] = params[r * X + k];
    b_.assign(params.begin() + static_cast<std::ptrdiff_t>(cell.weight_count()), params.end());
}

LstmSequenceKernel::Workspace LstmSequenceKernel::make_workspace(std::size_t steps) const {
    const std::size_t H = cell_.hidden();
    Workspace ws;
    ws.steps = steps;
    ws.gates.resize(steps * 4 * H);
    ws.candidate.resize(steps * H);
    ws.cells.assign((steps + 1) * H, 0.0);
    ws.hiddens.assign((steps + 1) * H, 0.0);
    ws.dz.resize(steps * 4 * H);
    ws.column.resize(steps);
    ws.dh.resize(H);
    ws.dc.resize(H);
    return ws;
}

std::span<const double> LstmSequenceKernel::forward(std::span<const double> seq, Workspace& ws) const {
    const std::size_t H = cell_.hidden(), F = cell_.input(), G = 4 * H, L = ws.steps;
    const Activation act = cell_.activation();
    const double* wt = wt_.data();

    for (std::size_t t = 0; t < L; ++t) {
        double* z = ws.gates.data() + t * G;
        std::copy(b_.begin(), b_.end(), z);
        accumulate_rows(ws.hiddens.data() + t * H, H, wt, G, z, G);
        accumulate_rows(seq.data() + t * F, F, wt + H * G, G, z, G);

        double* cand = ws.candidate.data() + t * H;
        const double* c_prev = ws.cells.data() + t * H;
        double* c = ws.cells.data() + (t + 1) * H;
        double* h = ws.hiddens.data() + (t + 1) * H;
        logistic(z, 2 * H);
        logistic(z + 3 * H, H);
        for (std::size_t j = 0; j < H; ++j) {
            cand[j] = z[2 * H + j];
            const double g = activate(act, cand[j]);
            z[2 * H + j] = g;
            c[j] = z[j] * c_prev[j] + z[H + j] * g;
            h[j] = z[3 * H + j] * activate(act, c[j]);
        }
    }
    return {ws.hiddens.data() + L * H, H};
}

void LstmSequenceKernel::backward(std::span<const double> seq, Workspace& ws, std::span<const double> dh_last,
                                  std::span<double> grad_t) const {
    const std::size_t H = cell_.hidden(), F = cell_.input(), G = 4 * H, X = H + F, L = ws.steps;
    const Activation act = cell_.activation();
    double* gw = grad_t.data();
    double* gb = grad_t.data() + cell_.weight_count();
    double* dh = ws.dh.data();
    double* dc = ws.dc.data();
    std::copy(dh_last.begin(), dh_last.end(), dh);
    std::fill(dc, dc + H, 0.0);

    for (std::size_t t = L; t-- > 0;) {
        const double* gates = ws.gates.data() + t * G;
        const double* cand = ws.candidate.data() + t * H;
        const double* c_prev = ws.cells.data() + t * H;
        const double* c = ws.cells.data() + (t + 1) * H;
        double* dz = ws.dz.data() + t * G;
        for (std::size_t j = 0; j < H; ++j) {
            const double f = gates[j], i = gates[H + j], g = gates[2 * H + j], o = gates[3 * H + j];
            const double a = activate(act, c[j]);
            const double d_o = dh[j] * a;
            const double d_c = dc[j] + dh[j] * o * activate_grad(act, c[j], a);
            dz[j] = d_c * c_prev[j] * f * (1.0 - f);
            dz[H + j] = d_c * g * i * (1.0 - i);
            dz[2 * H + j] = d_c * i * activate_grad(act, cand[j], g);
            dz[3 * H + j] = d_o * o * (1.0 - o);
            dc[j] = d_c * f;
        }
        if (t > 0) {
            std::fill(dh, dh + H, 0.0);
            accumulate_rows(dz, G, w_.data(), X, dh, H);
        }
    }

    // Weight gradient as one outer-product sum over steps: row k of Wt gets
    // sum_t input_t[k] * dz_t.
    double* column = ws.column.data();
    for (std::size_t k = 0; k < X; ++k) {
        for (std::size_t t = 0; t < L; ++t)
            column[t] = k < H ? ws.hiddens[t * H + k] : seq[t * F + (k - H)];
        accumulate_rows(column, L, ws.dz.data(), G, gw + k * G, G);
    }
    for (std::size_t t = 0; t < L; ++t) accumulate_rows(&kOne, 1, ws.dz.data() + t * G, G, gb, G);
}

void LstmSequenceKernel::add_canonical(std::span<const double> grad_t, std::span<double> grad) const {
    const std::size_t G = 4 * cell_.hidden(), X = cell_.concat(), W = cell_.weight_count();
    for (std::size_t r = 0; r < G; ++r)
        for (std::size_t k = 0; k < X; ++k) grad[r * X + k] += grad_t[k * G + r];
    for (std::size_t r = 0; r < G; ++r) grad[W + r] += grad_t[W + r];
}

}  // namespace gridcast::nn
