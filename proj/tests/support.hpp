#pragma once

// Shared fixtures and brute-force reference implementations for the tests.
// The references are written straight from the textbook formulas, with no
// code shared with the library beyond the container types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "spectralift/cube.hpp"
#include "spectralift/sin.hpp"

namespace testsupport {

using spectralift::CubeShape;
using spectralift::HsiCube;
using spectralift::MsiImage;
using spectralift::PsfKernel;
using spectralift::SrfMatrix;

inline HsiCube random_cube(std::mt19937_64& gen, std::size_t h, std::size_t w, std::size_t c, double lo = 0.0,
                           double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<float> data(h * w * c);
  for (auto& v : data) v = static_cast<float>(u(gen));
  return HsiCube(CubeShape{h, w, c}, std::move(data));
}

inline SrfMatrix random_srf(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(rows * cols);
  for (auto& v : w) v = u(gen);
  return SrfMatrix(rows, cols, std::move(w));
}

inline PsfKernel random_psf(std::mt19937_64& gen, std::size_t size) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(size * size);
  for (auto& v : w) v = u(gen);
  return PsfKernel(size, std::move(w));
}

namespace oracle {

inline std::vector<double> project(const HsiCube& x, const SrfMatrix& r) {
  std::vector<double> out(x.height() * x.width() * r.cols(), 0.0);
  for (std::size_t i = 0; i < x.height(); ++i)
    for (std::size_t j = 0; j < x.width(); ++j)
      for (std::size_t m = 0; m < r.cols(); ++m) {
        double s = 0.0;
        for (std::size_t n = 0; n < x.bands(); ++n) s += static_cast<double>(x.at(i, j, n)) * r(n, m);
        out[(i * x.width() + j) * r.cols() + m] = s;
      }
  return out;
}

// Symmetric padding done the long way: build the padded image, then run a
// correlation with the flipped kernel.
inline std::vector<double> blur(const HsiCube& x, const PsfKernel& k) {
  const long H = static_cast<long>(x.height()), W = static_cast<long>(x.width());
  const long C = static_cast<long>(x.bands()), K = static_cast<long>(k.size()), R = K / 2;
  const long PH = H + 2 * R, PW = W + 2 * R;
  auto mirror = [](long i, long n) {
    while (i < 0 || i >= n) i = i < 0 ? -1 - i : 2 * n - 1 - i;
    return i;
  };
  std::vector<double> padded(static_cast<std::size_t>(PH * PW * C));
  for (long i = 0; i < PH; ++i)
    for (long j = 0; j < PW; ++j)
      for (long b = 0; b < C; ++b)
        padded[static_cast<std::size_t>((i * PW + j) * C + b)] =
            x.at(static_cast<std::size_t>(mirror(i - R, H)), static_cast<std::size_t>(mirror(j - R, W)),
                 static_cast<std::size_t>(b));
  std::vector<double> out(static_cast<std::size_t>(H * W * C), 0.0);
  for (long i = 0; i < H; ++i)
    for (long j = 0; j < W; ++j)
      for (long b = 0; b < C; ++b) {
        double s = 0.0;
        for (long u = 0; u < K; ++u)
          for (long v = 0; v < K; ++v) {
            const double flipped = k(static_cast<std::size_t>(K - 1 - u), static_cast<std::size_t>(K - 1 - v));
            s += flipped * padded[static_cast<std::size_t>(((i + u) * PW + (j + v)) * C + b)];
          }
        out[static_cast<std::size_t>((i * W + j) * C + b)] = s;
      }
  return out;
}

struct Moments {
  long double mx = 0, my = 0, vx = 0, vy = 0, cxy = 0;
};

inline Moments band_moments(const HsiCube& x, const HsiCube& y, std::size_t b) {
  Moments m;
  const long double n = static_cast<long double>(x.height() * x.width());
  for (std::size_t i = 0; i < x.height(); ++i)
    for (std::size_t j = 0; j < x.width(); ++j) {
      m.mx += x.at(i, j, b);
      m.my += y.at(i, j, b);
    }
  m.mx /= n;
  m.my /= n;
  for (std::size_t i = 0; i < x.height(); ++i)
    for (std::size_t j = 0; j < x.width(); ++j) {
      const long double a = x.at(i, j, b) - m.mx, c = y.at(i, j, b) - m.my;
      m.vx += a * a;
      m.vy += c * c;
      m.cxy += a * c;
    }
  m.vx /= n;
  m.vy /= n;
  m.cxy /= n;
  return m;
}

inline double rmse(const HsiCube& x, const HsiCube& y) {
  long double s = 0;
  for (std::size_t i = 0; i < x.height(); ++i)
    for (std::size_t j = 0; j < x.width(); ++j)
      for (std::size_t b = 0; b < x.bands(); ++b) {
        const long double d = static_cast<long double>(x.at(i, j, b)) - y.at(i, j, b);
        s += d * d;
      }
  return static_cast<double>(std::sqrt(s / static_cast<long double>(x.shape().size())));
}

inline double psnr(const HsiCube& x, const HsiCube& y, double max_value = 1.0) {
  const double e = oracle::rmse(x, y);
  return 10.0 * std::log10(max_value * max_value / (e * e));
}

inline double ssim(const HsiCube& x, const HsiCube& y, double L = 1.0) {
  const long double c1 = (0.01L * L) * (0.01L * L), c2 = (0.03L * L) * (0.03L * L);
  long double total = 0;
  for (std::size_t b = 0; b < x.bands(); ++b) {
    const Moments m = band_moments(x, y, b);
    total += (2 * m.mx * m.my + c1) * (2 * m.cxy + c2) / ((m.mx * m.mx + m.my * m.my + c1) * (m.vx + m.vy + c2));
  }
  return static_cast<double>(total / static_cast<long double>(x.bands()));
}

inline double uiqi(const HsiCube& x, const HsiCube& y) {
  long double total = 0;
  for (std::size_t b = 0; b < x.bands(); ++b) {
    const Moments m = band_moments(x, y, b);
    total += 4 * m.cxy * m.mx * m.my / ((m.vx + m.vy) * (m.mx * m.mx + m.my * m.my));
  }
  return static_cast<double>(total / static_cast<long double>(x.bands()));
}

inline double ergas(const HsiCube& x, const HsiCube& y, double r) {
  long double acc = 0;
  const long double n = static_cast<long double>(x.height() * x.width());
  for (std::size_t b = 0; b < x.bands(); ++b) {
    long double mu = 0, se = 0;
    for (std::size_t i = 0; i < x.height(); ++i)
      for (std::size_t j = 0; j < x.width(); ++j) {
        mu += x.at(i, j, b);
        const long double d = static_cast<long double>(y.at(i, j, b)) - x.at(i, j, b);
        se += d * d;
      }
    mu /= n;
    acc += (se / n) / (mu * mu);
  }
  return static_cast<double>(100.0L / r * std::sqrt(acc / static_cast<long double>(x.bands())));
}

inline double sam(const HsiCube& x, const HsiCube& y) {
  long double total = 0;
  for (std::size_t i = 0; i < x.height(); ++i)
    for (std::size_t j = 0; j < x.width(); ++j) {
      long double d = 0, nx = 0, ny = 0;
      for (std::size_t b = 0; b < x.bands(); ++b) {
        d += static_cast<long double>(x.at(i, j, b)) * y.at(i, j, b);
        nx += static_cast<long double>(x.at(i, j, b)) * x.at(i, j, b);
        ny += static_cast<long double>(y.at(i, j, b)) * y.at(i, j, b);
      }
      long double c = d / (std::sqrt(nx) * std::sqrt(ny) + 1e-8L);
      if (c > 1 - 1e-9L) c = 1 - 1e-9L;
      if (c < -1) c = -1;
      total += std::acos(c);
    }
  return static_cast<double>(total / static_cast<long double>(x.height() * x.width()) * 180.0L /
                             std::numbers::pi_v<long double>);
}

// Scalar-by-scalar network evaluation for one pixel, following the layer
// equations literally: x_k = act(W_k x_{k-1} + b_k) (+ skip on even k).
inline std::vector<double> forward_pixel(const spectralift::SinParams& p, const std::vector<double>& input) {
  const auto& a = p.arch();
  auto act = [&](double z) {
    switch (a.activation) {
      case spectralift::Activation::Relu:
        return z > 0 ? z : 0.0;
      case spectralift::Activation::LeakyRelu:
        return z > 0 ? z : a.leaky_slope * z;
      case spectralift::Activation::Gelu: {
        const double k = std::sqrt(2.0 / std::numbers::pi);
        return 0.5 * z * (1.0 + std::tanh(k * (z + 0.044715 * z * z * z)));
      }
    }
    return z;
  };
  auto dense = [&](std::size_t layer, const std::vector<double>& in) {
    const auto w = p.weights(layer);
    const auto b = p.bias(layer);
    std::vector<double> out(b.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      double s = b[j];
      for (std::size_t i = 0; i < in.size(); ++i) s += w[i * out.size() + j] * in[i];
      out[j] = s;
    }
    return out;
  };
  std::vector<std::vector<double>> xs{input};
  for (std::size_t k = 1; k <= a.hidden_layers; ++k) {
    auto z = dense(k - 1, xs.back());
    for (double& v : z) v = act(v);
    if (a.skip && k % 2 == 0) {
      const std::size_t src = k == 2 ? 1 : k - 2;
      for (std::size_t j = 0; j < z.size(); ++j) z[j] += xs[src][j];
    }
    xs.push_back(std::move(z));
  }
  return dense(a.hidden_layers, xs.back());
}

}  // namespace oracle

// |a - b| / max(|a|, |b|, floor)
inline double rel_err(double a, double b, double floor = 1e-300) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace testsupport
