#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spectralift/error.hpp"
#include "spectralift/rng.hpp"
#include "spectralift/simd/kernels.hpp"
#include "spectralift/sin.hpp"

namespace spectralift {
namespace {

constexpr double kGeluC = 0.044715;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

double activate(const Architecture& arch, double z) {
  switch (arch.activation) {
    case Activation::LeakyRelu:
      return z > 0.0 ? z : arch.leaky_slope * z;
    case Activation::Relu:
      return z > 0.0 ? z : 0.0;
    case Activation::Gelu:
      return 0.5 * z * (1.0 + std::tanh(kSqrt2OverPi * (z + kGeluC * z * z * z)));
  }
  return z;
}

double activate_derivative(const Architecture& arch, double z) {
  switch (arch.activation) {
    case Activation::LeakyRelu:
      return z > 0.0 ? 1.0 : arch.leaky_slope;
    case Activation::Relu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::Gelu: {
      const double t = std::tanh(kSqrt2OverPi * (z + kGeluC * z * z * z));
      return 0.5 * (1.0 + t) + 0.5 * z * (1.0 - t * t) * kSqrt2OverPi * (1.0 + 3.0 * kGeluC * z * z);
    }
  }
  return 1.0;
}

bool is_skip_layer(const Architecture& arch, std::size_t k) { return arch.skip && k >= 2 && k % 2 == 0; }

// Index of the state added into skip layer k: x_2 takes x_1, x_4 takes x_2, x_6 takes x_4.
std::size_t skip_source(std::size_t k) { return k == 2 ? 1 : k - 2; }

// y = b + W^T x, with W stored input-major.
void dense(const SinParams& params, std::size_t layer, const double* x, double* y) {
  const auto& k = simd::kernels();
  const LayerSlot& slot = params.layers()[layer];
  const auto w = params.weights(layer);
  const auto b = params.bias(layer);
  std::copy(b.begin(), b.end(), y);
  for (std::size_t i = 0; i < slot.in; ++i) k.axpy(x[i], w.data() + i * slot.out, y, slot.out);
}

void validate_arch(const Architecture& arch) {
  if (arch.in_bands == 0 || arch.out_bands == 0) throw ParameterError("SIN band counts must be >= 1");
  if (arch.hidden_layers > 0 && arch.hidden_width == 0) throw ParameterError("SIN hidden width must be >= 1");
  if (!std::isfinite(arch.leaky_slope)) throw ParameterError("SIN leaky slope must be finite");
}

}  // namespace

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::LeakyRelu:
      return "leaky_relu";
    case Activation::Relu:
      return "relu";
    case Activation::Gelu:
      return "gelu";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "leaky_relu") return Activation::LeakyRelu;
  if (name == "relu") return Activation::Relu;
  if (name == "gelu") return Activation::Gelu;
  throw ParameterError("unknown activation '" + std::string(name) + "'");
}

std::size_t Architecture::parameter_count() const {
  if (hidden_layers == 0) return (in_bands + 1) * out_bands;
  const std::size_t h = hidden_width;
  return (in_bands + 1) * h + (hidden_layers - 1) * (h + 1) * h + (h + 1) * out_bands;
}

std::vector<LayerSlot> layer_layout(const Architecture& arch) {
  validate_arch(arch);
  std::vector<LayerSlot> slots;
  std::size_t offset = 0;
  std::size_t in = arch.in_bands;
  auto push = [&](std::size_t out) {
    LayerSlot s{in, out, offset, offset + in * out};
    offset = s.bias_offset + out;
    slots.push_back(s);
    in = out;
  };
  for (std::size_t k = 0; k < arch.hidden_layers; ++k) push(arch.hidden_width);
  push(arch.out_bands);
  return slots;
}

SinParams::SinParams(Architecture arch, std::vector<double> values)
    : arch_(arch), layers_(layer_layout(arch)), values_(std::move(values)) {
  if (values_.size() != arch_.parameter_count()) {
    throw DimensionError("SIN parameter vector has " + std::to_string(values_.size()) + " entries, expected " +
                         std::to_string(arch_.parameter_count()));
  }
}

std::span<const double> SinParams::weights(std::size_t layer) const {
  const LayerSlot& s = layers_.at(layer);
  return std::span<const double>(values_).subspan(s.weight_offset, s.in * s.out);
}

std::span<const double> SinParams::bias(std::size_t layer) const {
  const LayerSlot& s = layers_.at(layer);
  return std::span<const double>(values_).subspan(s.bias_offset, s.out);
}

SinParams init_params(const Architecture& arch, std::uint64_t seed) {
  const auto slots = layer_layout(arch);
  std::vector<double> values(arch.parameter_count(), 0.0);
  rng::Engine engine(rng::derive_seed(seed, "sin-init"));
  for (const LayerSlot& s : slots) {
    const double std_dev = std::sqrt(2.0 / static_cast<double>(s.in));
    for (std::size_t i = 0; i < s.in * s.out; ++i) values[s.weight_offset + i] = std_dev * engine.normal();
  }
  return SinParams(arch, std::move(values));
}

std::vector<double> forward(const SinParams& params, const SpectraView& batch, ForwardTrace* trace) {
  const Architecture& arch = params.arch();
  if (batch.bands != arch.in_bands) {
    throw DimensionError("SIN forward: batch has " + std::to_string(batch.bands) + " bands, network expects " +
                         std::to_string(arch.in_bands));
  }
  for (double v : batch.data.first(batch.count * batch.bands)) {
    if (!std::isfinite(v)) throw NumericError("SIN forward: non-finite input");
  }
  const std::size_t L = arch.hidden_layers;
  const std::size_t h = arch.hidden_width;
  const std::size_t n = batch.count;

  std::vector<double> out(n * arch.out_bands);
  // Per-pixel scratch when no trace is requested; otherwise write straight into the trace.
  std::vector<std::vector<double>> local_pre(L, std::vector<double>(h));
  std::vector<std::vector<double>> local_states(L + 1, std::vector<double>(h));
  if (trace != nullptr) {
    trace->count = n;
    trace->pre.assign(L, std::vector<double>(n * h));
    trace->states.assign(L + 1, {});
    trace->states[0].assign(batch.data.begin(), batch.data.begin() + static_cast<std::ptrdiff_t>(n * batch.bands));
    for (std::size_t k = 1; k <= L; ++k) trace->states[k].assign(n * h, 0.0);
  }

  for (std::size_t p = 0; p < n; ++p) {
    auto state = [&](std::size_t k) -> double* {
      if (trace != nullptr) return trace->states[k].data() + p * (k == 0 ? batch.bands : h);
      return k == 0 ? const_cast<double*>(batch.data.data() + p * batch.bands) : local_states[k].data();
    };
    auto pre = [&](std::size_t k) -> double* {
      return trace != nullptr ? trace->pre[k - 1].data() + p * h : local_pre[k - 1].data();
    };
    for (std::size_t k = 1; k <= L; ++k) {
      double* z = pre(k);
      dense(params, k - 1, state(k - 1), z);
      double* x = state(k);
      for (std::size_t j = 0; j < h; ++j) x[j] = activate(arch, z[j]);
      if (is_skip_layer(arch, k)) {
        const double* src = state(skip_source(k));
        for (std::size_t j = 0; j < h; ++j) x[j] += src[j];
      }
    }
    dense(params, L, state(L), out.data() + p * arch.out_bands);
  }
  return out;
}

void backward(const SinParams& params, const ForwardTrace& trace, std::span<const double> output_grad,
              std::span<double> grads) {
  const Architecture& arch = params.arch();
  if (grads.size() != params.size()) throw DimensionError("SIN backward: gradient buffer size mismatch");
  if (output_grad.size() != trace.count * arch.out_bands) {
    throw DimensionError("SIN backward: output gradient size mismatch");
  }
  const auto& k = simd::kernels();
  const std::size_t L = arch.hidden_layers;
  const std::size_t h = arch.hidden_width;
  const std::size_t c_in = arch.in_bands;
  const auto& slots = params.layers();

  std::vector<std::vector<double>> dstate(L + 1, std::vector<double>(h, 0.0));
  std::vector<double> dz(h);

  for (std::size_t p = 0; p < trace.count; ++p) {
    auto state = [&](std::size_t layer) {
      return trace.states[layer].data() + p * (layer == 0 ? c_in : h);
    };
    for (auto& d : dstate) std::fill(d.begin(), d.end(), 0.0);

    // Output layer.
    {
      const LayerSlot& s = slots[L];
      const double* dy = output_grad.data() + p * s.out;
      const double* x = state(L);
      const auto w = params.weights(L);
      for (std::size_t i = 0; i < s.in; ++i) k.axpy(x[i], dy, grads.data() + s.weight_offset + i * s.out, s.out);
      k.axpy(1.0, dy, grads.data() + s.bias_offset, s.out);
      if (L > 0) {
        for (std::size_t i = 0; i < s.in; ++i) dstate[L][i] = k.dot(w.data() + i * s.out, dy, s.out);
      }
    }

    for (std::size_t layer = L; layer >= 1; --layer) {
      const LayerSlot& s = slots[layer - 1];
      const double* d = dstate[layer].data();
      if (is_skip_layer(arch, layer)) {
        double* target = dstate[skip_source(layer)].data();
        for (std::size_t j = 0; j < h; ++j) target[j] += d[j];
      }
      const double* z = trace.pre[layer - 1].data() + p * h;
      for (std::size_t j = 0; j < h; ++j) dz[j] = d[j] * activate_derivative(arch, z[j]);
      const double* x = state(layer - 1);
      for (std::size_t i = 0; i < s.in; ++i) {
        k.axpy(x[i], dz.data(), grads.data() + s.weight_offset + i * s.out, s.out);
      }
      k.axpy(1.0, dz.data(), grads.data() + s.bias_offset, s.out);
      if (layer > 1) {
        const auto w = params.weights(layer - 1);
        double* prev = dstate[layer - 1].data();
        for (std::size_t i = 0; i < s.in; ++i) prev[i] += k.dot(w.data() + i * s.out, dz.data(), s.out);
      }
    }
  }
}

LossAndGradient loss_and_gradient(const SinParams& params, const SpectraView& inputs, const SpectraView& targets,
                                  LossKind kind, const LossOptions& opts) {
  ForwardTrace trace;
  const std::vector<double> pred = forward(params, inputs, &trace);
  const SpectraView pred_view{pred, inputs.count, params.arch().out_bands};
  LossAndGradient result;
  result.loss = loss(kind, pred_view, targets, opts);
  const std::vector<double> dpred = loss_gradient(kind, pred_view, targets, opts);
  result.grads.assign(params.size(), 0.0);
  backward(params, trace, dpred, result.grads);
  return result;
}

}  // namespace spectralift
