#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spectralift/degrade.hpp"

namespace spectralift {
namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double u) {
  if (u == 0.0) return 1.0;
  return std::sin(kPi * u) / (kPi * u);
}

double airy(double rho, double s) {
  const double u = kPi * rho / s;
  if (u == 0.0) return 1.0;
  const double j = 2.0 * std::cyl_bessel_j(1.0, u) / u;
  return j * j;
}

// Physicists' Hermite polynomial H2(t) = 4t^2 - 2.
double hermite2(double t) { return 4.0 * t * t - 2.0; }

double evaluate(const PsfKind& kind, double x, double y) {
  const double rho2 = x * x + y * y;
  const double rho = std::sqrt(rho2);
  const double w = kind.width;
  switch (kind.family) {
    case PsfFamily::Gaussian:
      return std::exp(-rho2 / (2.0 * w * w));
    case PsfFamily::Kolmogorov:
      return std::exp(-std::pow(rho / w, 5.0 / 3.0));
    case PsfFamily::Airy:
      return airy(rho, w);
    case PsfFamily::Moffat:
      return std::pow(1.0 + rho2 / (w * w), -kind.shape);
    case PsfFamily::Sinc: {
      const double s = sinc(rho / w);
      return s * s;
    }
    case PsfFamily::LorentzianSquared: {
      const double l = 1.0 + rho2 / (w * w);
      return 1.0 / (l * l);
    }
    case PsfFamily::Hermite:
      return std::abs(hermite2(x / w) * hermite2(y / w)) * std::exp(-rho2 / (2.0 * w * w));
    case PsfFamily::Parabolic:
      return std::max(0.0, 1.0 - rho2 / (w * w));
    case PsfFamily::Gabor:
      return std::exp(-rho2 / (2.0 * w * w)) * std::abs(std::cos(2.0 * kPi * x / kind.shape));
    case PsfFamily::Delta:
      return rho2 == 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

std::string_view psf_name(PsfFamily family) {
  switch (family) {
    case PsfFamily::Gaussian:
      return "gaussian";
    case PsfFamily::Kolmogorov:
      return "kolmogorov";
    case PsfFamily::Airy:
      return "airy";
    case PsfFamily::Moffat:
      return "moffat";
    case PsfFamily::Sinc:
      return "sinc";
    case PsfFamily::LorentzianSquared:
      return "lorentzian_squared";
    case PsfFamily::Hermite:
      return "hermite";
    case PsfFamily::Parabolic:
      return "parabolic";
    case PsfFamily::Gabor:
      return "gabor";
    case PsfFamily::Delta:
      return "delta";
  }
  return "unknown";
}

PsfFamily parse_psf(std::string_view name) {
  for (PsfFamily f : kAllPsfFamilies) {
    if (psf_name(f) == name) return f;
  }
  throw ParameterError("unknown PSF family '" + std::string(name) + "'");
}

PsfKind PsfKind::defaults(PsfFamily family) {
  switch (family) {
    case PsfFamily::Gaussian:
      return {family, 2.5, 0.0};
    case PsfFamily::Kolmogorov:
      return {family, 3.0, 0.0};
    case PsfFamily::Airy:
      return {family, 3.0, 0.0};
    case PsfFamily::Moffat:
      return {family, 3.0, 2.5};
    case PsfFamily::Sinc:
      return {family, 2.5, 0.0};
    case PsfFamily::LorentzianSquared:
      return {family, 2.5, 0.0};
    case PsfFamily::Hermite:
      return {family, 3.0, 0.0};
    case PsfFamily::Parabolic:
      return {family, 7.0, 0.0};
    case PsfFamily::Gabor:
      return {family, 2.5, 6.0};
    case PsfFamily::Delta:
      return {family, 1.0, 0.0};
  }
  return {family, 1.0, 0.0};
}

PsfKernel make_psf(const PsfKind& kind, std::size_t size) {
  if (size == 0 || size % 2 == 0) throw ParameterError("make_psf: size must be odd and >= 1");
  if (kind.family != PsfFamily::Delta) {
    if (!(kind.width > 0.0) || !std::isfinite(kind.width)) {
      throw ParameterError("make_psf: " + std::string(psf_name(kind.family)) + " width must be positive");
    }
    const bool needs_shape = kind.family == PsfFamily::Moffat || kind.family == PsfFamily::Gabor;
    if (needs_shape && (!(kind.shape > 0.0) || !std::isfinite(kind.shape))) {
      throw ParameterError("make_psf: " + std::string(psf_name(kind.family)) + " shape parameter must be positive");
    }
  }
  const double center = static_cast<double>(size / 2);
  std::vector<double> weights(size * size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const double v = evaluate(kind, static_cast<double>(j) - center, static_cast<double>(i) - center);
      weights[i * size + j] = std::max(0.0, v);
    }
  }
  return PsfKernel(size, std::move(weights));
}

}  // namespace spectralift
