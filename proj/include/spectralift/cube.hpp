#pragma once

// Shared image and sensor-operator types.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spectralift/error.hpp"

namespace spectralift {

struct CubeShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t bands = 0;

  std::size_t pixels() const { return height * width; }
  std::size_t size() const { return height * width * bands; }
  friend bool operator==(const CubeShape&, const CubeShape&) = default;
};

std::string to_string(const CubeShape& shape);

namespace detail {
void check_finite(std::span<const float> data);
void check_length(const CubeShape& shape, std::size_t length);
}  // namespace detail

struct HsiTag {};
struct MsiTag {};

/// H x W x B float image, row-major (row, col, band): each pixel's spectrum is contiguous.
///
/// The two instantiations are deliberately distinct types so hyperspectral and
/// multispectral images cannot be swapped at an interface by accident.
template <class Tag>
class BasicCube {
 public:
  BasicCube() = default;

  BasicCube(std::size_t height, std::size_t width, std::size_t bands, float fill = 0.0f)
      : shape_{height, width, bands}, data_(shape_.size(), fill) {
    detail::check_finite(std::span<const float>(&fill, 1));
  }

  BasicCube(CubeShape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
    detail::check_length(shape_, data_.size());
    detail::check_finite(data_);
  }

  const CubeShape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t bands() const { return shape_.bands; }
  std::size_t pixels() const { return shape_.pixels(); }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  float at(std::size_t row, std::size_t col, std::size_t band) const {
    return data_[(row * shape_.width + col) * shape_.bands + band];
  }
  float& at(std::size_t row, std::size_t col, std::size_t band) {
    return data_[(row * shape_.width + col) * shape_.bands + band];
  }

  std::span<const float> pixel(std::size_t row, std::size_t col) const {
    return std::span<const float>(data_).subspan((row * shape_.width + col) * shape_.bands, shape_.bands);
  }
  std::span<const float> pixel(std::size_t index) const {
    return std::span<const float>(data_).subspan(index * shape_.bands, shape_.bands);
  }
  std::span<float> pixel(std::size_t index) {
    return std::span<float>(data_).subspan(index * shape_.bands, shape_.bands);
  }

  /// Re-checks the finiteness invariant after writes through mutable_data().
  void validate() const { detail::check_finite(data_); }

  friend bool operator==(const BasicCube&, const BasicCube&) = default;

 private:
  CubeShape shape_{};
  std::vector<float> data_;
};

using HsiCube = BasicCube<HsiTag>;
using MsiImage = BasicCube<MsiTag>;

/// Reinterprets a cube under another tag (e.g. treating an MSI as a cube for metrics).
template <class To, class From>
BasicCube<To> retag(BasicCube<From> cube) {
  const CubeShape shape = cube.shape();
  std::vector<float> data(cube.data().begin(), cube.data().end());
  return BasicCube<To>(shape, std::move(data));
}

/// C x c spectral response operator; columns are normalized to unit sum at construction.
class SrfMatrix {
 public:
  /// `weights` is row-major: weights[n * cols + m] is the response of MSI band m to HSI band n.
  SrfMatrix(std::size_t rows, std::size_t cols, std::vector<double> weights);

  static SrfMatrix identity(std::size_t bands);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t n, std::size_t m) const { return weights_[n * cols_ + m]; }
  std::span<const double> row(std::size_t n) const {
    return std::span<const double>(weights_).subspan(n * cols_, cols_);
  }
  std::span<const double> weights() const { return weights_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> weights_;
};

/// Odd-sized, nonnegative, unit-sum spatial blur kernel.
class PsfKernel {
 public:
  /// Weights must be nonnegative with a positive sum; they are rescaled to sum to one.
  PsfKernel(std::size_t size, std::vector<double> weights);

  std::size_t size() const { return size_; }
  std::size_t radius() const { return size_ / 2; }
  double operator()(std::size_t row, std::size_t col) const { return weights_[row * size_ + col]; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::size_t size_;
  std::vector<double> weights_;
};

namespace detail {
void spectral_project(const CubeShape& shape, std::span<const float> in, const SrfMatrix& srf,
                      std::span<float> out);
void normalize(std::span<const float> in, std::span<float> out);
}  // namespace detail

/// out[i,j,m] = sum_n cube[i,j,n] * srf(n,m)
template <class Tag>
MsiImage spectral_project(const BasicCube<Tag>& cube, const SrfMatrix& srf) {
  if (cube.bands() != srf.rows()) {
    throw DimensionError("spectral_project: cube has " + std::to_string(cube.bands()) +
                         " bands but SRF has " + std::to_string(srf.rows()) + " rows");
  }
  MsiImage out(cube.height(), cube.width(), srf.cols());
  detail::spectral_project(cube.shape(), cube.data(), srf, out.mutable_data());
  return out;
}

/// Affine rescale of the whole cube to min 0, max 1.
template <class Tag>
BasicCube<Tag> normalize_cube(const BasicCube<Tag>& cube) {
  BasicCube<Tag> out(cube.height(), cube.width(), cube.bands());
  detail::normalize(cube.data(), out.mutable_data());
  return out;
}

}  // namespace spectralift
