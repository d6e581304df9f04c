#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spectralift/degrade.hpp"

namespace spectralift {

SrfMatrix make_gaussian_srf(std::size_t hsi_bands, std::size_t msi_bands, double fwhm_scale) {
  if (hsi_bands == 0 || msi_bands == 0) throw ParameterError("make_gaussian_srf: band counts must be >= 1");
  if (msi_bands > hsi_bands) {
    throw ParameterError("make_gaussian_srf: " + std::to_string(msi_bands) + " MSI bands exceed " +
                         std::to_string(hsi_bands) + " HSI bands");
  }
  if (!(fwhm_scale > 0.0) || !std::isfinite(fwhm_scale)) {
    throw ParameterError("make_gaussian_srf: fwhm_scale must be positive");
  }
  const double last = static_cast<double>(hsi_bands - 1);
  const double spacing = msi_bands == 1 ? static_cast<double>(hsi_bands) : last / static_cast<double>(msi_bands - 1);
  const double fwhm = fwhm_scale * spacing;
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));

  std::vector<double> w(hsi_bands * msi_bands);
  for (std::size_t m = 0; m < msi_bands; ++m) {
    const double center = msi_bands == 1 ? last / 2.0 : last * static_cast<double>(m) / static_cast<double>(msi_bands - 1);
    for (std::size_t n = 0; n < hsi_bands; ++n) {
      const double d = (static_cast<double>(n) - center) / sigma;
      w[n * msi_bands + m] = std::exp(-0.5 * d * d);
    }
  }
  return SrfMatrix(hsi_bands, msi_bands, std::move(w));
}

std::vector<std::size_t> srf_band_centers(const SrfMatrix& srf) {
  std::vector<std::size_t> centers(srf.cols(), 0);
  for (std::size_t m = 0; m < srf.cols(); ++m) {
    double best = -1.0;
    for (std::size_t n = 0; n < srf.rows(); ++n) {
      if (srf(n, m) > best) {
        best = srf(n, m);
        centers[m] = n;
      }
    }
  }
  return centers;
}

}  // namespace spectralift
