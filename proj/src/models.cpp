#include "gridcast/models.hpp"

#include <algorithm>
#include <sstream>

#include "gridcast/csv.hpp"
#include "gridcast/error.hpp"
#include "gridcast/nn/dropout.hpp"

namespace gridcast::models {

namespace {

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>)
            out += csv::format_double(values[i]);
        else
            out += std::to_string(values[i]);
    }
    return out;
}

std::vector<double> split_numbers(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    for (auto field : csv::split(text)) {
        auto v = csv::parse_double(field);
        if (!v) throw Error(Errc::Parse, "bad number list '" + text + "'");
        out.push_back(*v);
    }
    return out;
}

std::size_t parse_size(const std::string& text) {
    auto v = csv::parse_double(text);
    if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v)))
        throw Error(Errc::Parse, "bad count '" + text + "'");
    return static_cast<std::size_t>(*v);
}

void check_batch(const Matrix& x, std::span<const double> y, std::span<const std::size_t> idx,
                 std::span<double> grad, std::size_t width, std::size_t params) {
    if (x.cols() != width)
        throw Error(Errc::ShapeMismatch, "input has " + std::to_string(x.cols()) + " columns, model expects " +
                                             std::to_string(width));
    if (y.size() != x.rows()) throw Error(Errc::LengthMismatch, "target count differs from input rows");
    if (grad.size() != params) throw Error(Errc::ShapeMismatch, "gradient buffer size mismatch");
    if (idx.empty()) throw Error(Errc::EmptyInput, "empty batch");
    for (auto i : idx)
        if (i >= x.rows()) throw Error(Errc::InvalidArgument, "batch index out of range");
}

double mse(std::span<const double> pred, std::span<const double> y) {
    if (pred.size() != y.size()) throw Error(Errc::LengthMismatch, "target count differs from input rows");
    if (y.empty()) throw Error(Errc::EmptyInput, "loss over zero samples");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (pred[i] - y[i]) * (pred[i] - y[i]);
    return s / static_cast<double>(y.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Mlp

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
    if (spec_.input == 0) throw Error(Errc::InvalidArgument, "MLP input width must be positive");
    if (spec_.dropout.size() != spec_.hidden.size())
        throw Error(Errc::InvalidArgument, "MLP needs one dropout rate per hidden layer");
    std::size_t prev = spec_.input, offset = 0;
    for (std::size_t width : spec_.hidden) {
        if (width == 0) throw Error(Errc::InvalidArgument, "hidden width must be positive");
        layers_.emplace_back(prev, width, nn::Activation::Relu);
        prev = width;
    }
    for (double p : spec_.dropout)
        if (!(p >= 0.0 && p < 1.0)) throw Error(Errc::InvalidArgument, "dropout rate must lie in [0, 1)");
    layers_.emplace_back(prev, 1, nn::Activation::Identity);
    for (const auto& l : layers_) {
        offsets_.push_back(offset);
        offset += l.param_count();
    }
    params_.assign(offset, 0.0);
}

Mlp::Mlp(MlpSpec spec, nn::Rng& init) : Mlp(std::move(spec)) {
    for (std::size_t l = 0; l < layers_.size(); ++l)
        layers_[l].initialize(std::span<double>(params_).subspan(offsets_[l], layers_[l].param_count()), init);
}

std::span<const double> Mlp::layer_params(std::size_t layer) const {
    return std::span<const double>(params_).subspan(offsets_.at(layer), layers_.at(layer).param_count());
}

namespace {

/// Scratch buffers for one MLP sample.
struct MlpScratch {
    std::vector<std::vector<double>> in, pre, out;  // per layer
    std::vector<double> d_out, d_in;

    explicit MlpScratch(const std::vector<nn::DenseLayer>& layers) {
        for (const auto& l : layers) {
            in.emplace_back(l.in());
            pre.emplace_back(l.out());
            out.emplace_back(l.out());
        }
    }
};

}  // namespace

double Mlp::loss_and_gradient(const Matrix& x, std::span<const double> y, std::span<const std::size_t> idx,
                              std::span<double> grad, nn::Rng& rng, nn::Exec exec) const {
    check_batch(x, y, idx, grad, spec_.input, param_count());
    const std::size_t B = idx.size();
    const std::size_t hidden = spec_.hidden.size();

    std::vector<Matrix> masks;
    for (std::size_t l = 0; l < hidden; ++l) masks.push_back(nn::dropout_mask(B, spec_.hidden[l], spec_.dropout[l], rng));

    const double dscale = 2.0 / static_cast<double>(B);
    const auto sample = [&](std::size_t s, std::span<double> g, MlpScratch& sc) {
        const auto row = x.row(idx[s]);
        std::copy(row.begin(), row.end(), sc.in[0].begin());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            layers_[l].forward(layer_params(l), sc.in[l], sc.pre[l], sc.out[l]);
            if (l + 1 < layers_.size()) {
                const double keep = 1.0 / (1.0 - spec_.dropout[l]);
                const auto m = masks[l].row(s);
                for (std::size_t j = 0; j < sc.out[l].size(); ++j) sc.in[l + 1][j] = sc.out[l][j] * m[j] * keep;
            }
        }
        const double r = sc.out.back()[0] - y[idx[s]];
        sc.d_out.assign(1, dscale * r);
        for (std::size_t l = layers_.size(); l-- > 0;) {
            if (l + 1 < layers_.size()) {
                const double keep = 1.0 / (1.0 - spec_.dropout[l]);
                const auto m = masks[l].row(s);
                for (std::size_t j = 0; j < sc.d_out.size(); ++j) sc.d_out[j] *= m[j] * keep;
            }
            sc.d_in.assign(l > 0 ? layers_[l].in() : 0, 0.0);
            layers_[l].backward(layer_params(l), sc.in[l], sc.pre[l], sc.out[l], sc.d_out,
                                g.subspan(offsets_[l], layers_[l].param_count()), sc.d_in);
            std::swap(sc.d_out, sc.d_in);
        }
        return r * r;
    };

    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    if (exec == nn::Exec::Serial) {
        MlpScratch sc(layers_);
        for (std::size_t s = 0; s < B; ++s) loss += sample(s, grad, sc);
    } else {
        loss = nn::parallel_chunk_reduce(B, grad, [&](std::size_t begin, std::size_t end, std::span<double> g) {
            MlpScratch sc(layers_);
            double sum = 0.0;
            for (std::size_t s = begin; s < end; ++s) sum += sample(s, g, sc);
            return sum;
        });
    }
    return loss / static_cast<double>(B);
}

std::vector<double> Mlp::predict(const Matrix& x) const {
    if (x.cols() != spec_.input)
        throw Error(Errc::ShapeMismatch, "input has " + std::to_string(x.cols()) + " columns, MLP expects " +
                                             std::to_string(spec_.input));
    std::vector<double> out(x.rows());
    const auto n = static_cast<long long>(x.rows());
#pragma omp parallel
    {
        MlpScratch sc(layers_);
#pragma omp for schedule(static)
        for (long long i = 0; i < n; ++i) {
            const auto row = x.row(static_cast<std::size_t>(i));
            std::copy(row.begin(), row.end(), sc.in[0].begin());
            for (std::size_t l = 0; l < layers_.size(); ++l) {
                layers_[l].forward(layer_params(l), sc.in[l], sc.pre[l], sc.out[l]);
                if (l + 1 < layers_.size()) sc.in[l + 1] = sc.out[l];
            }
            out[static_cast<std::size_t>(i)] = sc.out.back()[0];
        }
    }
    return out;
}

double Mlp::evaluate_loss(const Matrix& x, std::span<const double> y) const { return mse(predict(x), y); }

nn::ModelFile Mlp::to_file(std::uint64_t seed) const {
    nn::ModelFile f;
    f.kind = "mlp";
    f.set("input", std::to_string(spec_.input));
    f.set("hidden", join(spec_.hidden));
    f.set("dropout", join(spec_.dropout));
    f.set("seed", std::to_string(seed));
    f.params = params_;
    return f;
}

Mlp Mlp::from_file(const nn::ModelFile& file) {
    if (file.kind != "mlp") throw Error(Errc::Parse, "model file holds '" + file.kind + "', expected mlp");
    MlpSpec spec;
    spec.input = parse_size(file.require("input"));
    spec.hidden.clear();
    for (double h : split_numbers(file.require("hidden"))) spec.hidden.push_back(static_cast<std::size_t>(h));
    spec.dropout = split_numbers(file.require("dropout"));
    Mlp m(spec);
    if (file.params.size() != m.param_count())
        throw Error(Errc::Parse, "MLP file has " + std::to_string(file.params.size()) + " parameters, spec needs " +
                                     std::to_string(m.param_count()));
    m.params_ = file.params;
    return m;
}

// ---------------------------------------------------------------------------
// LstmNet

LstmNet::LstmNet(LstmSpec spec)
    : spec_(spec), cell_(spec.features, spec.hidden, spec.activation), head_(spec.hidden, 1, nn::Activation::Identity) {
    if (spec.window == 0 || spec.features == 0 || spec.hidden == 0)
        throw Error(Errc::InvalidArgument, "LSTM window, features and hidden size must be positive");
    if (!(spec.dropout >= 0.0 && spec.dropout < 1.0))
        throw Error(Errc::InvalidArgument, "dropout rate must lie in [0, 1)");
    params_.assign(cell_.param_count() + head_.param_count(), 0.0);
}

LstmNet::LstmNet(LstmSpec spec, nn::Rng& init) : LstmNet(spec) {
    std::span<double> p(params_);
    cell_.initialize(p.first(cell_.param_count()), init);
    head_.initialize(p.subspan(cell_.param_count()), init);
}

void LstmNet::check_input(const Matrix& x) const {
    if (x.cols() != spec_.window * spec_.features)
        throw Error(Errc::ShapeMismatch, "window rows have " + std::to_string(x.cols()) + " values, LSTM expects " +
                                             std::to_string(spec_.window) + " x " + std::to_string(spec_.features));
}

double LstmNet::loss_and_gradient(const Matrix& x, std::span<const double> y, std::span<const std::size_t> idx,
                                  std::span<double> grad, nn::Rng& rng, nn::Exec exec) const {
    check_input(x);
    check_batch(x, y, idx, grad, x.cols(), param_count());
    const std::size_t B = idx.size(), H = spec_.hidden, L = spec_.window, F = spec_.features;
    const std::size_t cell_count = cell_.param_count();
    const Matrix mask = nn::dropout_mask(B, H, spec_.dropout, rng);
    const double keep = 1.0 / (1.0 - spec_.dropout);
    const double dscale = 2.0 / static_cast<double>(B);
    const auto w_head = head_params().first(H);
    const double b_head = head_params()[H];

    // Head on top of h_L: returns the residual and fills dh with dL/dh_L.
    const auto head = [&](std::size_t s, std::span<const double> h, std::span<double> g_head, std::span<double> dh) {
        const auto m = mask.row(s);
        double pred = b_head;
        for (std::size_t j = 0; j < H; ++j) pred += w_head[j] * h[j] * m[j] * keep;
        const double r = pred - y[idx[s]];
        const double d = dscale * r;
        for (std::size_t j = 0; j < H; ++j) {
            g_head[j] += d * h[j] * m[j] * keep;
            dh[j] = d * w_head[j] * m[j] * keep;
        }
        g_head[H] += d;
        return r;
    };

    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    if (exec == nn::Exec::Serial) {
        std::vector<double> dh(H);
        nn::LstmCache cache;
        for (std::size_t s = 0; s < B; ++s) {
            const auto row = x.row(idx[s]);
            Matrix seq(L, F, std::vector<double>(row.begin(), row.end()));
            const auto h = nn::lstm_forward(cell_, cell_params(), seq, &cache);
            const double r = head(s, h, grad.subspan(cell_count), dh);
            loss += r * r;
            nn::lstm_backward(cell_, cell_params(), cache, dh, grad.first(cell_count));
        }
    } else {
        const nn::LstmSequenceKernel kernel(cell_, cell_params());
        std::vector<double> grad_t(param_count(), 0.0);
        loss = nn::parallel_chunk_reduce(B, grad_t, [&](std::size_t begin, std::size_t end, std::span<double> g) {
            auto ws = kernel.make_workspace(L);
            std::vector<double> dh(H);
            double sum = 0.0;
            for (std::size_t s = begin; s < end; ++s) {
                const auto row = x.row(idx[s]);
                const auto h = kernel.forward(row, ws);
                const double r = head(s, h, g.subspan(cell_count), dh);
                sum += r * r;
                kernel.backward(row, ws, dh, g.first(cell_count));
            }
            return sum;
        });
        kernel.add_canonical(std::span<const double>(grad_t).first(cell_count), grad.first(cell_count));
        std::copy(grad_t.begin() + static_cast<std::ptrdiff_t>(cell_count), grad_t.end(),
                  grad.begin() + static_cast<std::ptrdiff_t>(cell_count));
    }
    return loss / static_cast<double>(B);
}

std::vector<double> LstmNet::predict(const Matrix& x) const {
    check_input(x);
    const nn::LstmSequenceKernel kernel(cell_, cell_params());
    const auto w_head = head_params().first(spec_.hidden);
    const double b_head = head_params()[spec_.hidden];
    std::vector<double> out(x.rows());
    const auto n = static_cast<long long>(x.rows());
#pragma omp parallel
    {
        auto ws = kernel.make_workspace(spec_.window);
#pragma omp for schedule(static)
        for (long long i = 0; i < n; ++i) {
            const auto h = kernel.forward(x.row(static_cast<std::size_t>(i)), ws);
            double pred = b_head;
            for (std::size_t j = 0; j < spec_.hidden; ++j) pred += w_head[j] * h[j];
            out[static_cast<std::size_t>(i)] = pred;
        }
    }
    return out;
}

double LstmNet::evaluate_loss(const Matrix& x, std::span<const double> y) const { return mse(predict(x), y); }

nn::ModelFile LstmNet::to_file(std::uint64_t seed) const {
    nn::ModelFile f;
    f.kind = "lstm";
    f.set("window", std::to_string(spec_.window));
    f.set("features", std::to_string(spec_.features));
    f.set("hidden", std::to_string(spec_.hidden));
    f.set("dropout", csv::format_double(spec_.dropout));
    f.set("activation", std::string(nn::to_string(spec_.activation)));
    f.set("seed", std::to_string(seed));
    f.params = params_;
    return f;
}

LstmNet LstmNet::from_file(const nn::ModelFile& file) {
    if (file.kind != "lstm") throw Error(Errc::Parse, "model file holds '" + file.kind + "', expected lstm");
    LstmSpec spec;
    spec.window = parse_size(file.require("window"));
    spec.features = parse_size(file.require("features"));
    spec.hidden = parse_size(file.require("hidden"));
    auto dropout = csv::parse_double(file.require("dropout"));
    if (!dropout) throw Error(Errc::Parse, "bad dropout rate");
    spec.dropout = *dropout;
    auto act = nn::activation_from_string(file.require("activation"));
    if (!act) throw Error(Errc::Parse, "unknown activation");
    spec.activation = *act;
    LstmNet m(spec);
    if (file.params.size() != m.param_count())
        throw Error(Errc::Parse, "LSTM file has " + std::to_string(file.params.size()) + " parameters, spec needs " +
                                     std::to_string(m.param_count()));
    m.params_ = file.params;
    return m;
}

// ---------------------------------------------------------------------------

std::vector<double> mlp_predict(const Mlp& model, const Matrix& features, const FeatureScalers& scalers) {
    if (!scalers.features.fitted() || !scalers.target.fitted())
        throw Error(Errc::ScalerNotFitted, "MLP prediction needs fitted feature and target scalers");
    if (features.cols() != model.spec().input)
        throw Error(Errc::ShapeMismatch, "feature matrix width does not match the MLP input");
    const auto scaled = model.predict(prep::transform(features, scalers.features));
    return prep::inverse_transform(scaled, scalers.target);
}

std::vector<double> lstm_predict(const LstmNet& model, const prep::WindowBatch& windows,
                                 const prep::ScalerParams& target_scaler) {
    if (!target_scaler.fitted()) throw Error(Errc::ScalerNotFitted, "LSTM prediction needs a fitted target scaler");
    if (windows.length != model.spec().window || windows.features != model.spec().features)
        throw Error(Errc::ShapeMismatch, "window shape does not match the LSTM spec");
    return prep::inverse_transform(model.predict(windows.inputs), target_scaler);
}

}  // namespace gridcast::models
