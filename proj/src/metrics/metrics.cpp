#include "spectralift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "spectralift/simd/kernels.hpp"

namespace spectralift {
namespace {

void check_same_shape(const HsiCube& x, const HsiCube& xhat, const char* metric) {
  if (x.shape() != xhat.shape()) {
    throw DimensionError(std::string(metric) + ": shapes differ (" + to_string(x.shape()) + " vs " +
                         to_string(xhat.shape()) + ")");
  }
  if (x.shape().size() == 0) throw DimensionError(std::string(metric) + ": empty cube");
}

struct BandStats {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov = 0.0;
};

// Two-pass population statistics of band `b` over the pixel window
// [row0, row0+rows) x [col0, col0+cols).
BandStats band_stats(const HsiCube& x, const HsiCube& y, std::size_t b, std::size_t row0, std::size_t rows,
                     std::size_t col0, std::size_t cols) {
  BandStats s;
  const auto n = static_cast<double>(rows * cols);
  for (std::size_t i = row0; i < row0 + rows; ++i) {
    for (std::size_t j = col0; j < col0 + cols; ++j) {
      s.mean_x += x.at(i, j, b);
      s.mean_y += y.at(i, j, b);
    }
  }
  s.mean_x /= n;
  s.mean_y /= n;
  for (std::size_t i = row0; i < row0 + rows; ++i) {
    for (std::size_t j = col0; j < col0 + cols; ++j) {
      const double dx = x.at(i, j, b) - s.mean_x;
      const double dy = y.at(i, j, b) - s.mean_y;
      s.var_x += dx * dx;
      s.var_y += dy * dy;
      s.cov += dx * dy;
    }
  }
  s.var_x /= n;
  s.var_y /= n;
  s.cov /= n;
  return s;
}

double ssim_from_stats(const BandStats& s, double c1, double c2) {
  return ((2.0 * s.mean_x * s.mean_y + c1) * (2.0 * s.cov + c2)) /
         ((s.mean_x * s.mean_x + s.mean_y * s.mean_y + c1) * (s.var_x + s.var_y + c2));
}

}  // namespace

double rmse(const HsiCube& x, const HsiCube& xhat) {
  check_same_shape(x, xhat, "rmse");
  const double sq = simd::kernels().sum_sq_diff_f32(x.data().data(), xhat.data().data(), x.data().size());
  return std::sqrt(sq / static_cast<double>(x.data().size()));
}

double psnr(const HsiCube& x, const HsiCube& xhat, double max_value) {
  const double e = rmse(x, xhat);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(max_value / e);
}

double ssim(const HsiCube& x, const HsiCube& xhat, const SsimOptions& opts) {
  check_same_shape(x, xhat, "ssim");
  const double c1 = (0.01 * opts.max_value) * (0.01 * opts.max_value);
  const double c2 = (0.03 * opts.max_value) * (0.03 * opts.max_value);
  double total = 0.0;
  for (std::size_t b = 0; b < x.bands(); ++b) {
    if (opts.window == SsimWindow::Global) {
      total += ssim_from_stats(band_stats(x, xhat, b, 0, x.height(), 0, x.width()), c1, c2);
      continue;
    }
    const std::size_t win = std::min({opts.window_size, x.height(), x.width()});
    if (win == 0) throw ParameterError("ssim: window size must be >= 1");
    double band_total = 0.0;
    std::size_t windows = 0;
    for (std::size_t i = 0; i + win <= x.height(); ++i) {
      for (std::size_t j = 0; j + win <= x.width(); ++j) {
        band_total += ssim_from_stats(band_stats(x, xhat, b, i, win, j, win), c1, c2);
        ++windows;
      }
    }
    total += band_total / static_cast<double>(windows);
  }
  return total / static_cast<double>(x.bands());
}

BandAverage uiqi(const HsiCube& x, const HsiCube& xhat) {
  check_same_shape(x, xhat, "uiqi");
  BandAverage out;
  std::size_t used = 0;
  for (std::size_t b = 0; b < x.bands(); ++b) {
    const BandStats s = band_stats(x, xhat, b, 0, x.height(), 0, x.width());
    const double denom = (s.var_x + s.var_y) * (s.mean_x * s.mean_x + s.mean_y * s.mean_y);
    if (denom == 0.0) {
      ++out.skipped_bands;
      continue;
    }
    out.value += 4.0 * s.cov * s.mean_x * s.mean_y / denom;
    ++used;
  }
  out.value = used > 0 ? out.value / static_cast<double>(used) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

BandAverage ergas(const HsiCube& x, const HsiCube& xhat, double r_ratio) {
  check_same_shape(x, xhat, "ergas");
  if (!(r_ratio > 0.0)) throw ParameterError("ergas: resolution ratio must be positive");
  BandAverage out;
  std::size_t used = 0;
  const auto pixels = static_cast<double>(x.pixels());
  double acc = 0.0;
  for (std::size_t b = 0; b < x.bands(); ++b) {
    double mean = 0.0;
    double sq = 0.0;
    for (std::size_t p = 0; p < x.pixels(); ++p) {
      const double xv = x.pixel(p)[b];
      const double d = static_cast<double>(xhat.pixel(p)[b]) - xv;
      mean += xv;
      sq += d * d;
    }
    mean /= pixels;
    if (mean == 0.0) {
      ++out.skipped_bands;
      continue;
    }
    acc += (sq / pixels) / (mean * mean);
    ++used;
  }
  out.value = used > 0 ? 100.0 / r_ratio * std::sqrt(acc / static_cast<double>(used))
                       : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double sam(const HsiCube& x, const HsiCube& xhat) {
  check_same_shape(x, xhat, "sam");
  double total = 0.0;
  for (std::size_t p = 0; p < x.pixels(); ++p) {
    const auto a = x.pixel(p);
    const auto b = xhat.pixel(p);
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      dot += static_cast<double>(a[k]) * b[k];
      na += static_cast<double>(a[k]) * a[k];
      nb += static_cast<double>(b[k]) * b[k];
    }
    const double cosine = dot / (std::sqrt(na) * std::sqrt(nb) + kSamEps);
    total += std::acos(std::clamp(cosine, -1.0, 1.0 - kSamDelta));
  }
  return total / static_cast<double>(x.pixels()) * (180.0 / std::numbers::pi);
}

MetricReport evaluate(const HsiCube& x, const HsiCube& xhat, double r_ratio, double max_value,
                      const SsimOptions& ssim_opts) {
  MetricReport r;
  r.rmse = rmse(x, xhat);
  r.psnr_db = r.rmse == 0.0 ? std::numeric_limits<double>::infinity() : 20.0 * std::log10(max_value / r.rmse);
  SsimOptions so = ssim_opts;
  so.max_value = max_value;
  r.ssim = ssim(x, xhat, so);
  const BandAverage q = uiqi(x, xhat);
  r.uiqi = q.value;
  r.uiqi_skipped_bands = q.skipped_bands;
  const BandAverage e = ergas(x, xhat, r_ratio);
  r.ergas = e.value;
  r.ergas_skipped_bands = e.skipped_bands;
  r.sam_deg = sam(x, xhat);
  r.r_ratio = r_ratio;
  r.max_value = max_value;
  r.ssim_c1 = (0.01 * max_value) * (0.01 * max_value);
  r.ssim_c2 = (0.03 * max_value) * (0.03 * max_value);
  return r;
}

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace spectralift
