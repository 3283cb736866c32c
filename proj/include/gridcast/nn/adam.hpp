#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gridcast::nn {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::vector<double> m;
    std::vector<double> v;
    long long step = 0;

    AdamState() = default;
    AdamState(std::size_t params, AdamConfig cfg = {}) : config(cfg), m(params, 0.0), v(params, 0.0) {}
};

/// Bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace gridcast::nn
