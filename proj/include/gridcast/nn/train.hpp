#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gridcast/error.hpp"
#include "gridcast/matrix.hpp"
#include "gridcast/nn/adam.hpp"
#include "gridcast/nn/early_stopping.hpp"
#include "gridcast/nn/kernels.hpp"
#include "gridcast/nn/rng.hpp"

namespace gridcast::nn {

/// Supervised samples: one row of x per target in y.
struct Dataset {
    Matrix x;
    std::vector<double> y;

    std::size_t size() const noexcept { return y.size(); }
};

/// What train() needs from a model: a flat parameter vector, a training-mode
/// batch loss with gradient (overwrites grad), and an inference-mode loss.
template <class M>
concept TrainableModel = requires(M& m, const M& cm, const Matrix& x, std::span<const double> y,
                                  std::span<const std::size_t> idx, std::span<double> grad, Rng& rng, Exec exec) {
    { cm.param_count() } -> std::convertible_to<std::size_t>;
    { m.params() } -> std::same_as<std::span<double>>;
    { cm.params() } -> std::same_as<std::span<const double>>;
    { cm.loss_and_gradient(x, y, idx, grad, rng, exec) } -> std::same_as<double>;
    { cm.evaluate_loss(x, y) } -> std::same_as<double>;
};

template <TrainableModel M>
std::size_t count_params(const M& model) {
    return model.param_count();
}

struct TrainConfig {
    std::size_t batch_size = 256;
    std::size_t max_epochs = 200;
    std::size_t patience = 10;
    AdamConfig adam;
    Exec exec = Exec::Parallel;
};

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainHistory {
    std::vector<EpochLog> epochs;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Minibatch Adam with per-epoch shuffling, validation after every epoch, and
/// early stopping. On return the model holds the best-validation parameters.
/// Throws Error(DivergedLoss) on a non-finite loss.
template <TrainableModel M>
TrainHistory train(M& model, const Dataset& train_set, const Dataset& val_set, const TrainConfig& config, Rng& rng,
                   const EpochCallback& on_epoch = {}) {
    if (train_set.size() == 0 || val_set.size() == 0)
        throw Error(Errc::EmptyInput, "training and validation sets must be non-empty");
    if (config.batch_size == 0) throw Error(Errc::InvalidArgument, "batch size must be positive");

    const std::size_t n = train_set.size();
    std::vector<std::size_t> order(n);
    std::vector<double> grad(model.param_count());
    AdamState adam(model.param_count(), config.adam);
    EarlyStopper stopper(config.patience);
    TrainHistory history;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
            const std::size_t end = std::min(n, begin + config.batch_size);
            const std::span<const std::size_t> idx(order.data() + begin, end - begin);
            const double loss = model.loss_and_gradient(train_set.x, train_set.y, idx, grad, rng, config.exec);
            if (!std::isfinite(loss))
                throw Error(Errc::DivergedLoss, "non-finite training loss in epoch " + std::to_string(epoch));
            adam_step(adam, model.params(), grad);
            loss_sum += loss * static_cast<double>(end - begin);
        }
        EpochLog log{epoch, loss_sum / static_cast<double>(n), model.evaluate_loss(val_set.x, val_set.y)};
        if (!std::isfinite(log.val_loss))
            throw Error(Errc::DivergedLoss, "non-finite validation loss in epoch " + std::to_string(epoch));
        history.epochs.push_back(log);
        if (on_epoch) on_epoch(log);
        if (stopper.update(log.val_loss, model.params())) {
            history.stopped_early = true;
            break;
        }
    }

    const auto& best = stopper.best_params();
    std::copy(best.begin(), best.end(), model.params().begin());
    history.best_epoch = stopper.best_epoch();
    history.best_val_loss = stopper.best_loss();
    return history;
}

}  // namespace gridcast::nn
