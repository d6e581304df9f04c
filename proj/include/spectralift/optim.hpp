#pragma once

// Adam, learning-rate schedules and the self-supervised training loop.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spectralift/cube.hpp"
#include "spectralift/sin.hpp"

namespace spectralift {

struct AdamState {
  std::uint64_t step = 0;
  std::vector<double> m;
  std::vector<double> v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t parameter_count = 0) : m(parameter_count, 0.0), v(parameter_count, 0.0) {}
};

/// Bias-corrected Adam update on a flat parameter vector. Throws NumericError
/// if any gradient is non-finite (nothing is modified in that case).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr);

/// Same, naming the offending layer in the error message.
void adam_step(SinParams& params, std::span<const double> grads, AdamState& state, double lr);

struct OneCycle {
  double initial_lr = 1e-4;
  double max_lr = 1e-3;
  double final_lr = 1e-6;
  std::size_t total_steps = 0;  // 0: use the training run's step count
  double peak_fraction = 0.3;
};

/// Cosine annealing with warm restarts. Cycle i spans T_i + 1 steps
/// (t = 0..T_i): it starts at max_lr and lands exactly on min_lr at t = T_i;
/// the next step restarts at max_lr with T_{i+1} = round(T_i * multiplier).
struct CosineRestarts {
  double max_lr = 1e-3;
  double min_lr = 1e-5;
  std::size_t first_cycle = 100;
  double multiplier = 2.0;
};

struct ConstantLr {
  double lr = 1e-3;
};

using Schedule = std::variant<OneCycle, CosineRestarts, ConstantLr>;

void validate_schedule(const Schedule& schedule);

/// Learning rate at optimizer step `step` of a run with `total` steps.
double lr_at(const Schedule& schedule, std::size_t step, std::size_t total);

/// Step index at which a OneCycle schedule peaks.
std::size_t one_cycle_peak_step(const OneCycle& s, std::size_t total);

struct TrainConfig {
  std::size_t epochs = 500;
  std::size_t batch_size = 1024;
  LossKind loss = LossKind::L1;
  LossOptions loss_options{};
  Schedule schedule = OneCycle{};
  std::uint64_t seed = 0;
  std::size_t early_stop_patience = 0;  // 0 disables early stopping
  bool strict = false;
  std::size_t threads = 1;
};

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double lr = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  SinParams params;
  std::vector<EpochLog> log;
  bool stopped_early = false;
};

/// Fits the network to invert `srf` on the pixels of `lr_hsi`: inputs are the
/// projected spectra Z = lr_hsi x srf, targets the LR-HSI spectra themselves.
/// `arch` band counts may be left at 0; they are taken from the SRF.
TrainResult train(const HsiCube& lr_hsi, const SrfMatrix& srf, Architecture arch, const TrainConfig& cfg);

/// Mean loss of `params` over every pixel of `lr_hsi` (same objective as training).
double evaluate_training_loss(const SinParams& params, const HsiCube& lr_hsi, const SrfMatrix& srf, LossKind kind,
                              const LossOptions& opts = {});

std::string training_log_csv(const std::vector<EpochLog>& log);

}  // namespace spectralift
