#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spectralift/degrade.hpp"
#include "spectralift/rng.hpp"
#include "spectralift/simd/kernels.hpp"

namespace spectralift {

double paired_hsi_snr_db(std::size_t r) {
  for (const auto& [ratio, snr] : kRatioSnrPairs) {
    if (ratio == r) return snr;
  }
  throw ParameterError("no benchmark SNR is paired with r=" + std::to_string(r));
}

namespace detail {

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  // Half-sample symmetric: ... b a | a b c ... z | z y ...
  const auto len = static_cast<std::ptrdiff_t>(n);
  if (i < 0) i = -i - 1;
  if (i >= len) i = 2 * len - i - 1;
  return static_cast<std::size_t>(i);
}

void blur(const CubeShape& shape, std::span<const float> in, const PsfKernel& kernel, std::span<float> out) {
  const auto& k = simd::kernels();
  const std::size_t bands = shape.bands;
  const auto radius = static_cast<std::ptrdiff_t>(kernel.radius());
  std::vector<double> acc(bands);
  for (std::size_t i = 0; i < shape.height; ++i) {
    for (std::size_t j = 0; j < shape.width; ++j) {
      std::fill(acc.begin(), acc.end(), 0.0);
      // True convolution: kernel tap (u, v) reads the pixel at offset -(u - radius, v - radius).
      for (std::size_t u = 0; u < kernel.size(); ++u) {
        const std::size_t src_row =
            reflect_index(static_cast<std::ptrdiff_t>(i) - (static_cast<std::ptrdiff_t>(u) - radius), shape.height);
        for (std::size_t v = 0; v < kernel.size(); ++v) {
          const double weight = kernel(u, v);
          if (weight == 0.0) continue;
          const std::size_t src_col =
              reflect_index(static_cast<std::ptrdiff_t>(j) - (static_cast<std::ptrdiff_t>(v) - radius), shape.width);
          k.axpy_f32(weight, in.data() + (src_row * shape.width + src_col) * bands, acc.data(), bands);
        }
      }
      float* dst = out.data() + (i * shape.width + j) * bands;
      for (std::size_t b = 0; b < bands; ++b) dst[b] = static_cast<float>(acc[b]);
    }
  }
}

void downsample(const CubeShape& shape, std::span<const float> in, std::size_t r, std::span<float> out) {
  const std::size_t out_w = shape.width / r;
  const std::size_t bands = shape.bands;
  for (std::size_t i = 0; i < shape.height / r; ++i) {
    for (std::size_t j = 0; j < out_w; ++j) {
      const float* src = in.data() + ((i * r) * shape.width + j * r) * bands;
      std::copy(src, src + bands, out.data() + (i * out_w + j) * bands);
    }
  }
}

void add_awgn(std::span<const float> in, double snr_db, std::uint64_t seed, std::span<float> out) {
  if (std::isinf(snr_db) && snr_db > 0.0) {
    std::copy(in.begin(), in.end(), out.begin());
    return;
  }
  if (!std::isfinite(snr_db)) throw ParameterError("add_awgn: SNR must be finite or +inf");
  double power = 0.0;
  for (float v : in) power += static_cast<double>(v) * static_cast<double>(v);
  power /= static_cast<double>(in.size());
  if (!(power > 0.0)) throw DegenerateInputError("add_awgn: signal power is zero");
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  const rng::CounterNormal normal(seed);
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(in[i]) + sigma * normal(i));
  }
}

}  // namespace detail

DegradedPair wald_degrade(const HsiCube& gt, const DegradationSpec& spec) {
  const auto [lo, hi] = std::minmax_element(gt.data().begin(), gt.data().end());
  if (gt.data().empty() || *lo < 0.0f || *hi > 1.0f) {
    throw ParameterError("wald_degrade: ground truth must be normalized to [0,1]");
  }
  const PsfKernel kernel = make_psf(spec.psf, spec.psf_size);
  const HsiCube blurred = blur_per_band(gt, kernel);
  const HsiCube decimated = downsample(blurred, spec.r);
  HsiCube lr_hsi = add_awgn(decimated, spec.hsi_snr_db, rng::derive_seed(spec.seed, "hsi-noise"));
  MsiImage hr_msi = add_awgn(spectral_project(gt, spec.srf), spec.msi_snr_db, rng::derive_seed(spec.seed, "msi-noise"));
  return {std::move(lr_hsi), std::move(hr_msi)};
}

}  // namespace spectralift
