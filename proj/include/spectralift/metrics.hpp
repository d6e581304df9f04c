#pragma once

// Full-reference reconstruction quality metrics.
//
// SSIM and UIQI use global per-band statistics (means, population variances
// and covariance over the whole band) by default; SsimWindow::Sliding gives
// the usual local-window SSIM for cross-tool comparison.

#include <cstddef>
#include <limits>
#include <string>

#include "spectralift/cube.hpp"

namespace spectralift {

inline constexpr double kSamEps = 1e-8;
inline constexpr double kSamDelta = 1e-9;

double rmse(const HsiCube& x, const HsiCube& xhat);

/// 20 log10(max_value / rmse); +inf when the cubes are identical.
double psnr(const HsiCube& x, const HsiCube& xhat, double max_value = 1.0);

enum class SsimWindow { Global, Sliding };

struct SsimOptions {
  double max_value = 1.0;
  SsimWindow window = SsimWindow::Global;
  std::size_t window_size = 7;  // Sliding only
};

double ssim(const HsiCube& x, const HsiCube& xhat, const SsimOptions& opts = {});

struct BandAverage {
  double value = 0.0;
  std::size_t skipped_bands = 0;
};

/// Bands with a zero denominator are skipped and counted.
BandAverage uiqi(const HsiCube& x, const HsiCube& xhat);

/// 100 / r_ratio * sqrt(mean_k RMSE_k^2 / mu_k^2), mu_k the mean of ground-truth band k.
/// Bands with zero mean are excluded and counted.
BandAverage ergas(const HsiCube& x, const HsiCube& xhat, double r_ratio);

/// Mean spectral angle in degrees with the clipped arccos argument.
double sam(const HsiCube& x, const HsiCube& xhat);

struct MetricReport {
  double rmse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double uiqi = 0.0;
  double ergas = 0.0;
  double sam_deg = 0.0;
  double r_ratio = 1.0;
  double max_value = 1.0;
  double ssim_c1 = 0.0;
  double ssim_c2 = 0.0;
  double sam_eps = kSamEps;
  double sam_delta = kSamDelta;
  std::size_t uiqi_skipped_bands = 0;
  std::size_t ergas_skipped_bands = 0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

MetricReport evaluate(const HsiCube& x, const HsiCube& xhat, double r_ratio, double max_value = 1.0,
                      const SsimOptions& ssim_opts = {});

/// Formats a metric for CSV/JSON text; infinities become "inf".
std::string format_metric(double v);

}  // namespace spectralift
