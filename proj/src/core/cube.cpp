#include "spectralift/cube.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spectralift/simd/kernels.hpp"

namespace spectralift {

std::string to_string(const CubeShape& shape) {
  return std::to_string(shape.height) + "x" + std::to_string(shape.width) + "x" + std::to_string(shape.bands);
}

namespace detail {

void check_finite(std::span<const float> data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw NumericError("cube sample " + std::to_string(i) + " is not finite");
    }
  }
}

void check_length(const CubeShape& shape, std::size_t length) {
  if (shape.size() != length) {
    throw DimensionError("cube " + to_string(shape) + " needs " + std::to_string(shape.size()) +
                         " samples, got " + std::to_string(length));
  }
}

void spectral_project(const CubeShape& shape, std::span<const float> in, const SrfMatrix& srf,
                      std::span<float> out) {
  const auto& k = simd::kernels();
  const std::size_t c_in = shape.bands;
  const std::size_t c_out = srf.cols();
  std::vector<double> acc(c_out);
  for (std::size_t p = 0; p < shape.pixels(); ++p) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const float* spectrum = in.data() + p * c_in;
    for (std::size_t n = 0; n < c_in; ++n) {
      k.axpy(static_cast<double>(spectrum[n]), srf.row(n).data(), acc.data(), c_out);
    }
    float* dst = out.data() + p * c_out;
    for (std::size_t m = 0; m < c_out; ++m) dst[m] = static_cast<float>(acc[m]);
  }
}

void normalize(std::span<const float> in, std::span<float> out) {
  if (in.empty()) throw DegenerateInputError("normalize_cube: empty cube");
  const auto [lo_it, hi_it] = std::minmax_element(in.begin(), in.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw DegenerateInputError("normalize_cube: cube is constant");
  const double span = hi - lo;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = static_cast<float>((static_cast<double>(in[i]) - lo) / span);
  }
}

}  // namespace detail

SrfMatrix::SrfMatrix(std::size_t rows, std::size_t cols, std::vector<double> weights)
    : rows_(rows), cols_(cols), weights_(std::move(weights)) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("SRF matrix must be at least 1x1");
  if (weights_.size() != rows_ * cols_) {
    throw DimensionError("SRF matrix " + std::to_string(rows_) + "x" + std::to_string(cols_) + " needs " +
                         std::to_string(rows_ * cols_) + " weights, got " + std::to_string(weights_.size()));
  }
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw ParameterError("SRF weights must be finite and nonnegative");
  }
  for (std::size_t m = 0; m < cols_; ++m) {
    double sum = 0.0;
    for (std::size_t n = 0; n < rows_; ++n) sum += weights_[n * cols_ + m];
    if (!(sum > 0.0)) throw ParameterError("SRF column " + std::to_string(m) + " sums to zero");
    for (std::size_t n = 0; n < rows_; ++n) weights_[n * cols_ + m] /= sum;
  }
}

SrfMatrix SrfMatrix::identity(std::size_t bands) {
  std::vector<double> w(bands * bands, 0.0);
  for (std::size_t n = 0; n < bands; ++n) w[n * bands + n] = 1.0;
  return SrfMatrix(bands, bands, std::move(w));
}

PsfKernel::PsfKernel(std::size_t size, std::vector<double> weights) : size_(size), weights_(std::move(weights)) {
  if (size_ == 0 || size_ % 2 == 0) throw ParameterError("PSF size must be odd and >= 1");
  if (weights_.size() != size_ * size_) throw DimensionError("PSF weight count does not match size^2");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw ParameterError("PSF weights must be finite and nonnegative");
    sum += w;
  }
  if (!(sum > 0.0)) throw ParameterError("PSF weights sum to zero");
  for (double& w : weights_) w /= sum;
}

}  // namespace spectralift
