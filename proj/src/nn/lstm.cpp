#include "gridcast/nn/lstm.hpp"

#include "gridcast/error.hpp"
#include "gridcast/nn/dense.hpp"

namespace gridcast::nn {

namespace {

void check_params(const LstmCell& cell, std::span<const double> p) {
    if (p.size() != cell.param_count())
        throw Error(Errc::ShapeMismatch, "LSTM parameter span has " + std::to_string(p.size()) + " values, expected " +
                                             std::to_string(cell.param_count()));
}

}  // namespace

void LstmCell::initialize(std::span<double> p, Rng& rng) const {
    const double limit = glorot_limit(concat(), hidden_);
    for (std::size_t i = 0; i < weight_count(); ++i) p[i] = rng.uniform(-limit, limit);
    for (std::size_t i = weight_count(); i < param_count(); ++i) p[i] = 0.0;
}

LstmState lstm_step(const LstmCell& cell, std::span<const double> p, std::span<const double> x,
                    std::span<const double> h_prev, std::span<const double> c_prev) {
    check_params(cell, p);
    const std::size_t H = cell.hidden();
    if (x.size() != cell.input() || h_prev.size() != H || c_prev.size() != H)
        throw Error(Errc::ShapeMismatch, "lstm_step input or state has the wrong size");

    std::vector<double> xcat(h_prev.begin(), h_prev.end());
    xcat.insert(xcat.end(), x.begin(), x.end());
    const auto preact = [&](Gate g, std::size_t j) {
        const auto w = cell.weight_row(p, g, j);
        double z = cell.bias(p, g, j);
        for (std::size_t k = 0; k < xcat.size(); ++k) z += w[k] * xcat[k];
        return z;
    };

    LstmState s{std::vector<double>(H), std::vector<double>(H)};
    for (std::size_t j = 0; j < H; ++j) {
        const double f = sigmoid(preact(Gate::Forget, j));
        const double i = sigmoid(preact(Gate::Input, j));
        const double g = activate(cell.activation(), preact(Gate::Candidate, j));
        const double o = sigmoid(preact(Gate::Output, j));
        s.c[j] = f * c_prev[j] + i * g;
        s.h[j] = o * activate(cell.activation(), s.c[j]);
    }
    return s;
}

std::vector<double> lstm_forward(const LstmCell& cell, std::span<const double> p, const Matrix& seq,
                                 LstmCache* cache) {
    check_params(cell, p);
    if (seq.cols() != cell.input())
        throw Error(Errc::ShapeMismatch, "sequence has " + std::to_string(seq.cols()) + " features, cell expects " +
                                             std::to_string(cell.input()));
    if (seq.rows() == 0) throw Error(Errc::ShapeMismatch, "empty sequence");
    const std::size_t H = cell.hidden(), L = seq.rows(), X = cell.concat();
    const Activation act = cell.activation();

    LstmCache local;
    LstmCache& c = cache ? *cache : local;
    c.inputs = seq;
    c.gates = Matrix(L, 4 * H);
    c.candidate = Matrix(L, H);
    c.cells = Matrix(L + 1, H);
    c.hiddens = Matrix(L + 1, H);

    std::vector<double> xcat(X);
    for (std::size_t t = 0; t < L; ++t) {
        const auto h_prev = c.hiddens.row(t);
        std::copy(h_prev.begin(), h_prev.end(), xcat.begin());
        const auto xt = seq.row(t);
        std::copy(xt.begin(), xt.end(), xcat.begin() + static_cast<std::ptrdiff_t>(H));

        auto gates = c.gates.row(t);
        for (std::size_t r = 0; r < 4 * H; ++r) {
            const double* w = p.data() + r * X;
            double z = p[cell.weight_count() + r];
            for (std::size_t k = 0; k < X; ++k) z += w[k] * xcat[k];
            if (r / H == static_cast<std::size_t>(Gate::Candidate)) {
                c.candidate(t, r - 2 * H) = z;
                gates[r] = activate(act, z);
            } else {
                gates[r] = sigmoid(z);
            }
        }
        for (std::size_t j = 0; j < H; ++j) {
            const double f = gates[j], i = gates[H + j], g = gates[2 * H + j], o = gates[3 * H + j];
            c.cells(t + 1, j) = f * c.cells(t, j) + i * g;
            c.hiddens(t + 1, j) = o * activate(act, c.cells(t + 1, j));
        }
    }
    c.valid = true;
    const auto last = c.hiddens.row(L);
    return {last.begin(), last.end()};
}

void lstm_backward(const LstmCell& cell, std::span<const double> p, const LstmCache& cache,
                   std::span<const double> dh_last, std::span<double> grad, Matrix* dseq) {
    if (!cache.valid) throw Error(Errc::NoCachedForward, "lstm_backward called without a cached forward pass");
    check_params(cell, p);
    const std::size_t H = cell.hidden(), F = cell.input(), X = cell.concat(), L = cache.steps();
    if (dh_last.size() != H || grad.size() != cell.param_count())
        throw Error(Errc::ShapeMismatch, "lstm_backward gradient shapes do not match the cell");
    const Activation act = cell.activation();
    if (dseq) *dseq = Matrix(L, F);

    std::vector<double> dh(dh_last.begin(), dh_last.end());
    std::vector<double> dc(H, 0.0);
    std::vector<double> dz(4 * H);
    std::vector<double> dxcat(X);
    std::vector<double> xcat(X);
    double* gw = grad.data();
    double* gb = grad.data() + cell.weight_count();

    for (std::size_t t = L; t-- > 0;) {
        const auto gates = cache.gates.row(t);
        for (std::size_t j = 0; j < H; ++j) {
            const double f = gates[j], i = gates[H + j], g = gates[2 * H + j], o = gates[3 * H + j];
            const double c_t = cache.cells(t + 1, j);
            const double a = activate(act, c_t);
            const double d_o = dh[j] * a;
            const double d_c = dc[j] + dh[j] * o * activate_grad(act, c_t, a);
            dz[j] = d_c * cache.cells(t, j) * f * (1.0 - f);
            dz[H + j] = d_c * g * i * (1.0 - i);
            dz[2 * H + j] = d_c * i * activate_grad(act, cache.candidate(t, j), g);
            dz[3 * H + j] = d_o * o * (1.0 - o);
            dc[j] = d_c * f;
        }

        const auto h_prev = cache.hiddens.row(t);
        std::copy(h_prev.begin(), h_prev.end(), xcat.begin());
        const auto xt = cache.inputs.row(t);
        std::copy(xt.begin(), xt.end(), xcat.begin() + static_cast<std::ptrdiff_t>(H));
        std::fill(dxcat.begin(), dxcat.end(), 0.0);
        for (std::size_t r = 0; r < 4 * H; ++r) {
            const double d = dz[r];
            gb[r] += d;
            double* gr = gw + r * X;
            const double* w = p.data() + r * X;
            for (std::size_t k = 0; k < X; ++k) {
                gr[k] += d * xcat[k];
                dxcat[k] += d * w[k];
            }
        }
        std::copy(dxcat.begin(), dxcat.begin() + static_cast<std::ptrdiff_t>(H), dh.begin());
        if (dseq)
            for (std::size_t k = 0; k < F; ++k) (*dseq)(t, k) = dxcat[H + k];
    }
}

}  // namespace gridcast::nn
