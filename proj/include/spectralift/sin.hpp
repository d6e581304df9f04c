#pragma once

// Spectral Inversion Network: a per-pixel residual MLP from c-band MSI spectra
// to C-band HSI spectra, with hand-written forward and reverse passes.
//
// Layout: hidden layers phi_1..phi_L followed by a linear output layer g.
// With skips enabled, every even hidden layer k adds the output of the
// previous skip point: x_2 = phi_2(x_1) + x_1, x_4 = phi_4(x_3) + x_2, ...
// A network with zero hidden layers is a single affine map.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace spectralift {

enum class Activation { LeakyRelu, Relu, Gelu };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct Architecture {
  std::size_t in_bands = 0;
  std::size_t out_bands = 0;
  std::size_t hidden_width = 64;
  std::size_t hidden_layers = 6;
  Activation activation = Activation::LeakyRelu;
  bool skip = true;
  double leaky_slope = 0.01;

  /// Closed-form parameter count: (c+1)h + (L-1)(h+1)h + (h+1)C, or (c+1)C when L = 0.
  std::size_t parameter_count() const;
  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Weights and bias of one dense layer inside the flat parameter vector.
/// Weights are stored input-major: w[i * out + j] connects input i to output j.
struct LayerSlot {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
  friend bool operator==(const LayerSlot&, const LayerSlot&) = default;
};

std::vector<LayerSlot> layer_layout(const Architecture& arch);

/// All trainable parameters in one flat vector, layer by layer (weights then bias).
class SinParams {
 public:
  SinParams(Architecture arch, std::vector<double> values);

  const Architecture& arch() const { return arch_; }
  const std::vector<LayerSlot>& layers() const { return layers_; }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }

  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> bias(std::size_t layer) const;

  friend bool operator==(const SinParams&, const SinParams&) = default;

 private:
  Architecture arch_;
  std::vector<LayerSlot> layers_;
  std::vector<double> values_;
};

/// He-normal weights (std = sqrt(2 / fan_in)), zero biases.
SinParams init_params(const Architecture& arch, std::uint64_t seed);

/// Row-major batch of spectra: `count` rows of `bands` values.
struct SpectraView {
  std::span<const double> data;
  std::size_t count = 0;
  std::size_t bands = 0;

  std::span<const double> row(std::size_t i) const { return data.subspan(i * bands, bands); }
};

/// Intermediate values of a forward pass, kept for the reverse pass.
/// For pixel p and hidden layer k (1-based), pre[k-1] holds W_k x_{k-1} + b_k
/// and states[k] holds x_k; states[0] is the input.
struct ForwardTrace {
  std::size_t count = 0;
  std::vector<std::vector<double>> pre;     // per hidden layer, count * width
  std::vector<std::vector<double>> states;  // per layer 0..L, count * width_k
};

/// Evaluates the network on every row of `batch`. Rows are independent; the
/// result for a pixel does not depend on the other rows in the batch.
std::vector<double> forward(const SinParams& params, const SpectraView& batch, ForwardTrace* trace = nullptr);

enum class LossKind { L1, Mse, Cosine };

std::string_view loss_name(LossKind kind);
LossKind parse_loss(std::string_view name);

/// How the L1 loss reduces over bands. The training objective sums |r| over
/// bands and averages over pixels.
enum class L1Reduction { SumBands, MeanBands };

struct LossOptions {
  L1Reduction l1_reduction = L1Reduction::SumBands;
  double cosine_eps = 1e-8;
};

/// L1: mean over pixels of ||r||_1; MSE: mean of r^2 over all samples;
/// Cosine: mean over pixels of 1 - <p,t> / (||p|| ||t|| + eps).
double loss(LossKind kind, const SpectraView& pred, const SpectraView& target, const LossOptions& opts = {});

/// dLoss/dPred, same layout as pred. The L1 subgradient at zero residual is 0.
std::vector<double> loss_gradient(LossKind kind, const SpectraView& pred, const SpectraView& target,
                                  const LossOptions& opts = {});

/// Reverse pass. Accumulates (adds) into `grads`, which must have params.size() entries.
void backward(const SinParams& params, const ForwardTrace& trace, std::span<const double> output_grad,
              std::span<double> grads);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grads;
};

/// Forward + loss + reverse pass on one batch.
LossAndGradient loss_and_gradient(const SinParams& params, const SpectraView& inputs, const SpectraView& targets,
                                  LossKind kind, const LossOptions& opts = {});

}  // namespace spectralift
