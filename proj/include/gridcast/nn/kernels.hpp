#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "gridcast/nn/lstm.hpp"

namespace gridcast::nn {

/// Serial runs the per-sample reference layer code in sample order.
/// Parallel runs the optimised kernels over fixed-size chunks with OpenMP.
enum class Exec { Serial, Parallel };

std::string_view to_string(Exec e) noexcept;

/// Samples per reduction chunk. Parallel results depend on this constant but
/// never on the number of threads.
inline constexpr std::size_t kReductionChunk = 16;

/// Signature: (begin, end, chunk_grad) -> summed loss over [begin, end).
using ChunkFn = std::function<double(std::size_t, std::size_t, std::span<double>)>;

/// Splits [0, count) into kReductionChunk-sized chunks, runs them in parallel,
/// and sums the chunk gradients into `grad` in chunk order. Returns the total loss.
double parallel_chunk_reduce(std::size_t count, std::span<double> grad, const ChunkFn& fn);

/// Cache-friendly LSTM forward/backward for one sequence. Holds the weights
/// transposed to (H+F) x 4H so each recurrence step is a run of contiguous
/// axpy updates over the 4H gate pre-activations.
class LstmSequenceKernel {
public:
    struct Workspace {
        std::size_t steps = 0;
        std::vector<double> gates;      // L x 4H
        std::vector<double> candidate;  // L x H
        std::vector<double> cells;      // (L+1) x H
        std::vector<double> hiddens;    // (L+1) x H
        std::vector<double> dz;         // L x 4H
        std::vector<double> column;     // L
        std::vector<double> dh;         // H
        std::vector<double> dc;         // H
    };

    LstmSequenceKernel(const LstmCell& cell, std::span<const double> params);

    const LstmCell& cell() const noexcept { return cell_; }
    Workspace make_workspace(std::size_t steps) const;

    /// seq is L x F flattened step-major. Returns h_L (a view into ws).
    std::span<const double> forward(std::span<const double> seq, Workspace& ws) const;

    /// Accumulates into a gradient laid out as Wt ((H+F) x 4H) followed by b (4H).
    void backward(std::span<const double> seq, Workspace& ws, std::span<const double> dh_last,
                  std::span<double> grad_transposed) const;

    /// Adds a transposed-layout gradient into the canonical LstmCell layout.
    void add_canonical(std::span<const double> grad_transposed, std::span<double> grad) const;

private:
    LstmCell cell_;
    std::vector<double> w_;   // 4H x (H+F), canonical
    std::vector<double> wt_;  // (H+F) x 4H
    std::vector<double> b_;   // 4H
};

}  // namespace gridcast::nn
