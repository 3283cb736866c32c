#pragma once

#include <span>
#include <vector>

namespace gridcast::nn {

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;  // dL/dpred
};

/// Mean squared error (1/n) sum (pred - target)^2 and its gradient (2/n)(pred - target).
LossGrad mse_loss(std::span<const double> pred, std::span<const double> target);

}  // namespace gridcast::nn
