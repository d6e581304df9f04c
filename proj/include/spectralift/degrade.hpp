#pragma once

// Synthetic sensor degradation: PSF blur, decimation, white noise and
// spectral projection, composed into LR-HSI / HR-MSI pairs.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spectralift/cube.hpp"

namespace spectralift {

enum class PsfFamily {
  Gaussian,
  Kolmogorov,
  Airy,
  Moffat,
  Sinc,
  LorentzianSquared,
  Hermite,
  Parabolic,
  Gabor,
  Delta,
};

inline constexpr std::array<PsfFamily, 10> kAllPsfFamilies = {
    PsfFamily::Gaussian, PsfFamily::Kolmogorov, PsfFamily::Airy,      PsfFamily::Moffat, PsfFamily::Sinc,
    PsfFamily::LorentzianSquared, PsfFamily::Hermite, PsfFamily::Parabolic, PsfFamily::Gabor, PsfFamily::Delta,
};

std::string_view psf_name(PsfFamily family);
PsfFamily parse_psf(std::string_view name);

/// A PSF family plus its shape parameters.
///
/// `width` is the family's scale (Gaussian/Hermite/Gabor sigma, Kolmogorov and
/// Moffat alpha, Airy and Sinc s, Lorentzian gamma, Parabolic radius). `shape`
/// is the secondary parameter (Moffat beta, Gabor wavelength); unused
/// otherwise. Delta ignores both.
struct PsfKind {
  PsfFamily family = PsfFamily::Gaussian;
  double width = 2.5;
  double shape = 0.0;

  /// Representative parameters for each family at kernel size 15.
  static PsfKind defaults(PsfFamily family);
};

inline constexpr std::size_t kDefaultPsfSize = 15;

PsfKernel make_psf(const PsfKind& kind, std::size_t size = kDefaultPsfSize);

/// Noise-free sentinel for the SNR arguments.
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct DegradationSpec {
  PsfKind psf = PsfKind::defaults(PsfFamily::Gaussian);
  std::size_t r = 4;
  double hsi_snr_db = 35.0;
  SrfMatrix srf = SrfMatrix::identity(1);
  double msi_snr_db = 40.0;
  std::uint64_t seed = 0;
  std::size_t psf_size = kDefaultPsfSize;
};

/// (r, HSI SNR dB) pairs of the benchmark grid.
inline constexpr std::array<std::pair<std::size_t, double>, 4> kRatioSnrPairs = {{
    {4, 35.0}, {8, 30.0}, {16, 25.0}, {32, 20.0}}};

/// (r, MSI band count) configurations of the benchmark grid.
inline constexpr std::array<std::pair<std::size_t, std::size_t>, 8> kGridRatioBands = {{
    {4, 4}, {8, 4}, {16, 4}, {32, 4}, {8, 1}, {8, 3}, {8, 8}, {8, 16}}};

/// HSI SNR paired with a downsampling factor in the benchmark grid.
double paired_hsi_snr_db(std::size_t r);

namespace detail {
void blur(const CubeShape& shape, std::span<const float> in, const PsfKernel& kernel, std::span<float> out);
void downsample(const CubeShape& shape, std::span<const float> in, std::size_t r, std::span<float> out);
void add_awgn(std::span<const float> in, double snr_db, std::uint64_t seed, std::span<float> out);
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n);
}  // namespace detail

/// Same-size per-band convolution with half-sample symmetric (mirror) padding.
template <class Tag>
BasicCube<Tag> blur_per_band(const BasicCube<Tag>& cube, const PsfKernel& kernel) {
  if (kernel.size() > 2 * cube.height() || kernel.size() > 2 * cube.width()) {
    throw DimensionError("blur_per_band: kernel " + std::to_string(kernel.size()) + " too large for image " +
                         to_string(cube.shape()));
  }
  BasicCube<Tag> out(cube.height(), cube.width(), cube.bands());
  detail::blur(cube.shape(), cube.data(), kernel, out.mutable_data());
  return out;
}

/// Strided decimation: out[i,j,:] = cube[i*r, j*r, :].
template <class Tag>
BasicCube<Tag> downsample(const BasicCube<Tag>& cube, std::size_t r) {
  if (r == 0) throw ParameterError("downsample: factor must be >= 1");
  if (cube.height() % r != 0 || cube.width() % r != 0) {
    throw DimensionError("downsample: " + to_string(cube.shape()) + " is not divisible by r=" + std::to_string(r));
  }
  BasicCube<Tag> out(cube.height() / r, cube.width() / r, cube.bands());
  detail::downsample(cube.shape(), cube.data(), r, out.mutable_data());
  return out;
}

/// Adds i.i.d. Gaussian noise with variance mean(x^2) / 10^(snr_db/10).
/// snr_db = kNoNoise returns the input unchanged.
template <class Tag>
BasicCube<Tag> add_awgn(const BasicCube<Tag>& cube, double snr_db, std::uint64_t seed) {
  BasicCube<Tag> out(cube.height(), cube.width(), cube.bands());
  detail::add_awgn(cube.data(), snr_db, seed, out.mutable_data());
  return out;
}

struct DegradedPair {
  HsiCube lr_hsi;
  MsiImage hr_msi;
};

DegradedPair wald_degrade(const HsiCube& gt, const DegradationSpec& spec);

/// Gaussian band profiles with centers (C-1)*m/(c-1); FWHM = fwhm_scale * center spacing.
SrfMatrix make_gaussian_srf(std::size_t hsi_bands, std::size_t msi_bands, double fwhm_scale = 1.0);

/// Index of the largest entry of each SRF column.
std::vector<std::size_t> srf_band_centers(const SrfMatrix& srf);

}  // namespace spectralift
