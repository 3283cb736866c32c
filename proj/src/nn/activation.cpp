#include "gridcast/nn/activation.hpp"

namespace gridcast::nn {

std::string_view to_string(Activation a) noexcept {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

std::optional<Activation> activation_from_string(std::string_view s) noexcept {
    for (auto a : {Activation::Identity, Activation::Relu, Activation::Tanh, Activation::Sigmoid})
        if (to_string(a) == s) return a;
    return std::nullopt;
}

}  // namespace gridcast::nn
