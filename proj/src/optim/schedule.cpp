#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectralift/error.hpp"
#include "spectralift/optim.hpp"

namespace spectralift {
namespace {

constexpr double kPi = std::numbers::pi;

// Half-cosine interpolation from `from` (progress 0) to `to` (progress 1).
double cosine_blend(double from, double to, double progress) {
  if (progress <= 0.0) return from;
  if (progress >= 1.0) return to;
  return to + (from - to) * 0.5 * (1.0 + std::cos(kPi * progress));
}

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

double one_cycle_lr(const OneCycle& s, std::size_t step, std::size_t total) {
  const std::size_t n = s.total_steps > 0 ? s.total_steps : total;
  if (n <= 1) return s.max_lr;
  const std::size_t last = n - 1;
  const std::size_t peak = one_cycle_peak_step(s, total);
  if (step == peak) return s.max_lr;
  if (step >= last) return s.final_lr;
  if (step < peak) {
    return cosine_blend(s.initial_lr, s.max_lr, static_cast<double>(step) / static_cast<double>(peak));
  }
  return cosine_blend(s.max_lr, s.final_lr, static_cast<double>(step - peak) / static_cast<double>(last - peak));
}

double cosine_restarts_lr(const CosineRestarts& s, std::size_t step) {
  std::size_t cycle = std::max<std::size_t>(1, s.first_cycle);
  std::size_t t = step;
  while (t > cycle) {
    t -= cycle + 1;
    cycle = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(cycle) * s.multiplier)));
  }
  if (t == 0) return s.max_lr;
  if (t == cycle) return s.min_lr;
  return cosine_blend(s.max_lr, s.min_lr, static_cast<double>(t) / static_cast<double>(cycle));
}

}  // namespace

std::size_t one_cycle_peak_step(const OneCycle& s, std::size_t total) {
  const std::size_t n = s.total_steps > 0 ? s.total_steps : total;
  if (n <= 1) return 0;
  const auto peak = static_cast<std::size_t>(std::llround(s.peak_fraction * static_cast<double>(n)));
  return std::min(peak, n - 1);
}

void validate_schedule(const Schedule& schedule) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, OneCycle>) {
          require(s.initial_lr > 0.0 && s.final_lr > 0.0 && s.max_lr > 0.0, "OneCycle learning rates must be positive");
          require(s.initial_lr <= s.max_lr && s.final_lr <= s.max_lr, "OneCycle initial/final LR must not exceed max");
          require(s.peak_fraction >= 0.0 && s.peak_fraction <= 1.0, "OneCycle peak fraction must lie in [0,1]");
        } else if constexpr (std::is_same_v<T, CosineRestarts>) {
          require(s.min_lr > 0.0 && s.min_lr <= s.max_lr, "CosineRestarts needs 0 < min <= max");
          require(s.first_cycle >= 1, "CosineRestarts first cycle must be >= 1 step");
          require(s.multiplier >= 1.0 && std::isfinite(s.multiplier), "CosineRestarts multiplier must be >= 1");
        } else {
          require(s.lr > 0.0 && std::isfinite(s.lr), "constant learning rate must be positive");
        }
      },
      schedule);
}

double lr_at(const Schedule& schedule, std::size_t step, std::size_t total) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, OneCycle>) {
          return one_cycle_lr(s, step, total);
        } else if constexpr (std::is_same_v<T, CosineRestarts>) {
          return cosine_restarts_lr(s, step);
        } else {
          return s.lr;
        }
      },
      schedule);
}

}  // namespace spectralift
