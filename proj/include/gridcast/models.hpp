#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridcast/matrix.hpp"
#include "gridcast/nn/dense.hpp"
#include "gridcast/nn/kernels.hpp"
#include "gridcast/nn/lstm.hpp"
#include "gridcast/nn/rng.hpp"
#include "gridcast/nn/serialize.hpp"
#include "gridcast/preprocess.hpp"

namespace gridcast::models {

/// Static regressor: Input(7) -> Dense(64, relu) -> Dropout(0.2)
/// -> Dense(32, relu) -> Dropout(0.1) -> Dense(1).
struct MlpSpec {
    std::size_t input = prep::kStaticFeatures;
    std::vector<std::size_t> hidden = {64, 32};
    std::vector<double> dropout = {0.2, 0.1};

    bool operator==(const MlpSpec&) const = default;
};

class Mlp {
public:
    /// All parameters zero.
    explicit Mlp(MlpSpec spec = {});
    /// Glorot-uniform weights, zero biases.
    Mlp(MlpSpec spec, nn::Rng& init);

    const MlpSpec& spec() const noexcept { return spec_; }
    const std::vector<nn::DenseLayer>& layers() const noexcept { return layers_; }
    std::size_t param_count() const noexcept { return params_.size(); }
    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }
    std::span<const double> layer_params(std::size_t layer) const;

    /// Training-mode batch MSE over rows `idx` of x; overwrites grad.
    double loss_and_gradient(const Matrix& x, std::span<const double> y, std::span<const std::size_t> idx,
                             std::span<double> grad, nn::Rng& rng, nn::Exec exec = nn::Exec::Parallel) const;
    /// Inference-mode MSE.
    double evaluate_loss(const Matrix& x, std::span<const double> y) const;
    /// Inference-mode outputs (dropout off), one per row.
    std::vector<double> predict(const Matrix& x) const;

    nn::ModelFile to_file(std::uint64_t seed) const;
    static Mlp from_file(const nn::ModelFile& file);

private:
    MlpSpec spec_;
    std::vector<nn::DenseLayer> layers_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

/// Sequence regressor: Input(L, F) -> LSTM(H, relu) -> Dropout(0.2) -> Dense(1).
struct LstmSpec {
    std::size_t window = 24;
    std::size_t features = 1;
    std::size_t hidden = 50;
    double dropout = 0.2;
    nn::Activation activation = nn::Activation::Relu;

    bool operator==(const LstmSpec&) const = default;
};

class LstmNet {
public:
    explicit LstmNet(LstmSpec spec = {});
    LstmNet(LstmSpec spec, nn::Rng& init);

    const LstmSpec& spec() const noexcept { return spec_; }
    const nn::LstmCell& cell() const noexcept { return cell_; }
    const nn::DenseLayer& head() const noexcept { return head_; }
    std::size_t param_count() const noexcept { return params_.size(); }
    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }
    std::span<const double> cell_params() const { return std::span<const double>(params_).first(cell_.param_count()); }
    std::span<const double> head_params() const { return std::span<const double>(params_).subspan(cell_.param_count()); }

    /// x rows are windows flattened step-major (L*F values).
    double loss_and_gradient(const Matrix& x, std::span<const double> y, std::span<const std::size_t> idx,
                             std::span<double> grad, nn::Rng& rng, nn::Exec exec = nn::Exec::Parallel) const;
    double evaluate_loss(const Matrix& x, std::span<const double> y) const;
    std::vector<double> predict(const Matrix& x) const;

    nn::ModelFile to_file(std::uint64_t seed) const;
    static LstmNet from_file(const nn::ModelFile& file);

private:
    void check_input(const Matrix& x) const;

    LstmSpec spec_;
    nn::LstmCell cell_;
    nn::DenseLayer head_;
    std::vector<double> params_;
};

/// Scalers fitted on the training slice only.
struct FeatureScalers {
    prep::ScalerParams features;  // 7 static columns
    prep::ScalerParams target;    // consumption
};

/// Scale -> forward (inference mode) -> inverse-scale to watts.
std::vector<double> mlp_predict(const Mlp& model, const Matrix& features, const FeatureScalers& scalers);

/// One-step-ahead predictions in watts for windows built on the scaled series.
std::vector<double> lstm_predict(const LstmNet& model, const prep::WindowBatch& windows,
                                 const prep::ScalerParams& target_scaler);

}  // namespace gridcast::models
