#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gridcast/matrix.hpp"
#include "gridcast/nn/activation.hpp"
#include "gridcast/nn/rng.hpp"

namespace gridcast::nn {

/// Gate order inside the packed parameter block.
enum class Gate : std::size_t { Forget = 0, Input = 1, Candidate = 2, Output = 3 };

/// LSTM cell with hidden size H and input size F.
///
/// Parameter layout (caller-owned span): W is 4H x (H+F) row-major, gate
/// blocks stacked forget, input, candidate, output; each row acts on the
/// concatenation [h_prev, x_t]. The 4H biases follow in the same gate order.
///
/// `activation` is the nonlinearity on the cell candidate and on the cell
/// state before the output gate (tanh in the textbook cell; relu reproduces
/// the LSTM(50, relu) configuration). Gates always use the logistic sigmoid.
class LstmCell {
public:
    LstmCell() = default;
    LstmCell(std::size_t input, std::size_t hidden, Activation activation = Activation::Tanh)
        : input_(input), hidden_(hidden), act_(activation) {}

    std::size_t input() const noexcept { return input_; }
    std::size_t hidden() const noexcept { return hidden_; }
    std::size_t concat() const noexcept { return hidden_ + input_; }
    Activation activation() const noexcept { return act_; }
    std::size_t weight_count() const noexcept { return 4 * hidden_ * concat(); }
    std::size_t param_count() const noexcept { return 4 * (hidden_ * concat() + hidden_); }

    /// Row `j` of gate `g`'s weight matrix.
    std::span<const double> weight_row(std::span<const double> p, Gate g, std::size_t j) const {
        return p.subspan((static_cast<std::size_t>(g) * hidden_ + j) * concat(), concat());
    }
    double bias(std::span<const double> p, Gate g, std::size_t j) const {
        return p[weight_count() + static_cast<std::size_t>(g) * hidden_ + j];
    }

    /// Glorot-uniform per gate matrix (fan_in H+F, fan_out H), zero biases.
    void initialize(std::span<double> p, Rng& rng) const;

private:
    std::size_t input_ = 0;
    std::size_t hidden_ = 0;
    Activation act_ = Activation::Tanh;
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;
};

/// One recurrence step from (h_prev, c_prev) on input x_t.
LstmState lstm_step(const LstmCell& cell, std::span<const double> p, std::span<const double> x,
                    std::span<const double> h_prev, std::span<const double> c_prev);

/// Per-step activations kept by lstm_forward for backpropagation through time.
struct LstmCache {
    Matrix inputs;      // L x F
    Matrix gates;       // L x 4H, post-activation f, i, candidate, o
    Matrix candidate;   // L x H, candidate pre-activation
    Matrix cells;       // (L+1) x H, row 0 is the zero initial state
    Matrix hiddens;     // (L+1) x H, row 0 is the zero initial state
    bool valid = false;

    std::size_t steps() const noexcept { return inputs.rows(); }
};

/// Runs the sequence (L x F) from zero state and returns h_L.
std::vector<double> lstm_forward(const LstmCell& cell, std::span<const double> p, const Matrix& seq,
                                 LstmCache* cache = nullptr);

/// Full (untruncated) backpropagation through time from dL/dh_L. Accumulates
/// parameter gradients into `grad`; writes dL/dx_t into `dseq` when given.
void lstm_backward(const LstmCell& cell, std::span<const double> p, const LstmCache& cache,
                   std::span<const double> dh_last, std::span<double> grad, Matrix* dseq = nullptr);

}  // namespace gridcast::nn
