#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace gridcast::nn {

/// Tracks the best validation loss and a snapshot of the parameters that
/// produced it. Signals a stop once `patience` consecutive epochs fail to
/// improve strictly on the best.
class EarlyStopper {
public:
    explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

    /// Returns true when training should stop after this epoch.
    bool update(double val_loss, std::span<const double> params) {
        ++epoch_;
        if (val_loss < best_loss_) {
            best_loss_ = val_loss;
            best_epoch_ = epoch_;
            best_params_.assign(params.begin(), params.end());
            since_improvement_ = 0;
        } else {
            ++since_improvement_;
        }
        return since_improvement_ >= patience_;
    }

    double best_loss() const noexcept { return best_loss_; }
    std::size_t best_epoch() const noexcept { return best_epoch_; }
    std::size_t epochs_since_improvement() const noexcept { return since_improvement_; }
    const std::vector<double>& best_params() const noexcept { return best_params_; }
    bool has_best() const noexcept { return best_epoch_ > 0; }

private:
    std::size_t patience_;
    std::size_t epoch_ = 0;
    std::size_t best_epoch_ = 0;
    std::size_t since_improvement_ = 0;
    double best_loss_ = std::numeric_limits<double>::infinity();
    std::vector<double> best_params_;
};

}  // namespace gridcast::nn
