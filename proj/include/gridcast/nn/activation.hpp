#pragma once

#include <cmath>
#include <optional>
#include <string_view>

namespace gridcast::nn {

enum class Activation { Identity, Relu, Tanh, Sigmoid };

std::string_view to_string(Activation a) noexcept;
std::optional<Activation> activation_from_string(std::string_view s) noexcept;

inline double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double activate(Activation a, double z) noexcept {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        case Activation::Sigmoid: return sigmoid(z);
    }
    return z;
}

/// Derivative at pre-activation z, given y = activate(a, z).
inline double activate_grad(Activation a, double z, double y) noexcept {
    switch (a) {
        case Activation::Identity: return 1.0;
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: return 1.0 - y * y;
        case Activation::Sigmoid: return y * (1.0 - y);
    }
    return 1.0;
}

}  // namespace gridcast::nn
