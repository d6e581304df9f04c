#include <cmath>
#include <string>

#include "spectralift/error.hpp"
#include "spectralift/optim.hpp"
#include "spectralift/simd/kernels.hpp"

namespace spectralift {
namespace {

void apply(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ParameterError("adam_step: learning rate must be positive");
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError("adam_step: optimizer state does not match parameter count");
  }
  state.step += 1;
  const auto t = static_cast<double>(state.step);
  const simd::AdamCoefficients c{lr, state.beta1, state.beta2, state.eps, 1.0 - std::pow(state.beta1, t),
                                 1.0 - std::pow(state.beta2, t)};
  simd::kernels().adam_update(params.data(), grads.data(), state.m.data(), state.v.data(), params.size(), c);
}

}  // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr) {
  if (grads.size() != params.size()) throw DimensionError("adam_step: gradient size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) throw NumericError("adam_step: non-finite gradient at index " + std::to_string(i));
  }
  apply(params, grads, state, lr);
}

void adam_step(SinParams& params, std::span<const double> grads, AdamState& state, double lr) {
  if (grads.size() != params.size()) throw DimensionError("adam_step: gradient size mismatch");
  const auto& layers = params.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerSlot& s = layers[l];
    const std::size_t end = s.bias_offset + s.out;
    for (std::size_t i = s.weight_offset; i < end; ++i) {
      if (!std::isfinite(grads[i])) {
        const std::string name = l + 1 == layers.size() ? "output layer" : "hidden layer " + std::to_string(l + 1);
        const std::string part = i < s.bias_offset ? "weights" : "bias";
        throw NumericError("adam_step: non-finite gradient in " + name + " " + part);
      }
    }
  }
  apply(params.mutable_values(), grads, state, lr);
}

}  // namespace spectralift
