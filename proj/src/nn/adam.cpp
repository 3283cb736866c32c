#include "gridcast/nn/adam.hpp"

#include <cmath>

#include "gridcast/error.hpp"

namespace gridcast::nn {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size() || state.m.size() != params.size() || state.v.size() != params.size())
        throw Error(Errc::ShapeMismatch, "Adam state, parameters and gradients must have equal sizes");
    const auto& cfg = state.config;
    ++state.step;
    const double k = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(cfg.beta1, k);
    const double c2 = 1.0 - std::pow(cfg.beta2, k);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

}  // namespace gridcast::nn
