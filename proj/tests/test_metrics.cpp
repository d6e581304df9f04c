#include <cmath>
#include <random>

#include "doctest.h"
#include "spectralift/error.hpp"
#include "spectralift/metrics.hpp"
#include "support.hpp"

using namespace spectralift;
using testsupport::random_cube;
using testsupport::rel_err;
namespace oracle = testsupport::oracle;

namespace {

HsiCube shifted(const HsiCube& x, float d) {
  std::vector<float> v(x.data().begin(), x.data().end());
  for (auto& e : v) e += d;
  return HsiCube(x.shape(), v);
}

HsiCube scaled(const HsiCube& x, float s) {
  std::vector<float> v(x.data().begin(), x.data().end());
  for (auto& e : v) e *= s;
  return HsiCube(x.shape(), v);
}

}  // namespace

TEST_CASE("metrics on identical cubes") {
  std::mt19937_64 gen(1);
  const HsiCube x = random_cube(gen, 6, 5, 4);
  const MetricReport r = evaluate(x, x, 4.0);
  CHECK(r.rmse == 0.0);
  CHECK(std::isinf(r.psnr_db));
  CHECK(std::abs(r.ssim - 1.0) < 1e-12);
  CHECK(std::abs(r.uiqi - 1.0) < 1e-12);
  CHECK(r.ergas == 0.0);
  CHECK(r.sam_deg >= 0.0);
  // the epsilon in the denominator leaves a small nonzero angle
  CHECK(r.sam_deg == doctest::Approx(testsupport::oracle::sam(x, x)).epsilon(1e-9));
  CHECK(r.sam_deg < 0.02);
  CHECK(r == evaluate(x, x, 4.0));
  CHECK(format_metric(r.psnr_db) == "inf");
}

TEST_CASE("rmse and psnr examples") {
  const HsiCube x(CubeShape{2, 2, 2}, {0.1f, 0.2f, 0.3f, 0.4f, 0.5f, 0.6f, 0.7f, 0.8f});
  const HsiCube y = shifted(x, 0.1f);
  CHECK(rmse(x, y) == doctest::Approx(0.1).epsilon(1e-6));

  const HsiCube a(1, 1, 1, 0.0f), b(1, 1, 1, 0.01f), c(1, 1, 1, 1.0f);
  CHECK(psnr(a, b) == doctest::Approx(40.0).epsilon(1e-6));
  CHECK(psnr(a, c) == 0.0);
  CHECK(std::isinf(psnr(a, a)));

  std::mt19937_64 gen(2);
  const HsiCube p = random_cube(gen, 4, 4, 3), q = random_cube(gen, 4, 4, 3);
  CHECK(std::abs(rmse(p, q) - oracle::rmse(p, q)) < 1e-12);
  CHECK(psnr(p, q) == 20.0 * std::log10(1.0 / rmse(p, q)));
  CHECK_THROWS_AS(rmse(p, random_cube(gen, 4, 4, 2)), DimensionError);
}

TEST_CASE("ssim of an anticorrelated band") {
  // x = {0.4, 0.6}, xhat = 1 - x: means 0.5, variances 0.01, covariance -0.01.
  const HsiCube x(CubeShape{1, 2, 1}, {0.4f, 0.6f}), y(CubeShape{1, 2, 1}, {0.6f, 0.4f});
  const double s = ssim(x, y);
  CHECK(s < 0.0);
  CHECK(s == doctest::Approx(-0.0191 / 0.0209).epsilon(1e-6));
}

TEST_CASE("uiqi of a doubled band") {
  const HsiCube x(CubeShape{1, 2, 1}, {0.2f, 0.4f}), y(CubeShape{1, 2, 1}, {0.4f, 0.8f});
  const BandAverage q = uiqi(x, y);
  CHECK(q.value == doctest::Approx(0.64).epsilon(1e-6));
  CHECK(q.skipped_bands == 0);

  const HsiCube z(2, 2, 1, 0.0f);
  const BandAverage skipped = uiqi(z, z);
  CHECK(skipped.skipped_bands == 1);
}

TEST_CASE("ergas example and zero-mean bands") {
  // mean 0.5, per-band RMSE 0.05, r = 4 -> 100 / 4 * 0.1 = 2.5
  const HsiCube x(CubeShape{1, 2, 1}, {0.4f, 0.6f}), y(CubeShape{1, 2, 1}, {0.45f, 0.65f});
  CHECK(ergas(x, y, 4.0).value == doctest::Approx(2.5).epsilon(1e-5));

  const HsiCube two(CubeShape{1, 2, 2}, {0.0f, 0.4f, 0.0f, 0.6f});
  const HsiCube two_hat(CubeShape{1, 2, 2}, {0.1f, 0.45f, 0.1f, 0.65f});
  const BandAverage e = ergas(two, two_hat, 4.0);
  CHECK(e.skipped_bands == 1);
  CHECK(e.value == doctest::Approx(2.5).epsilon(1e-5));
  CHECK_THROWS_AS(ergas(x, y, 0.0), ParameterError);
}

TEST_CASE("sam examples") {
  const HsiCube a(CubeShape{1, 1, 2}, {1.f, 0.f}), b(CubeShape{1, 1, 2}, {0.f, 1.f});
  CHECK(sam(a, b) == doctest::Approx(90.0).epsilon(1e-9));
  std::mt19937_64 gen(3);
  const HsiCube x = random_cube(gen, 3, 3, 5, 0.1, 1.0);
  const double floor = sam(x, x);
  CHECK(std::abs(sam(x, scaled(x, 3.0f)) - floor) < 0.003);
  CHECK(floor < 0.02);
}

TEST_CASE("sliding-window ssim") {
  std::mt19937_64 gen(4);
  const HsiCube x = random_cube(gen, 9, 9, 2);
  SsimOptions so;
  so.window = SsimWindow::Sliding;
  CHECK(std::abs(ssim(x, x, so) - 1.0) < 1e-12);
  const HsiCube y = random_cube(gen, 9, 9, 2);
  const double s = ssim(x, y, so);
  CHECK(s > -1.0);
  CHECK(s < 1.0);
  // A window covering the whole image is the global statistic.
  so.window_size = 100;
  CHECK(ssim(x, y, so) == doctest::Approx(ssim(x, y)).epsilon(1e-12));
}

TEST_CASE("metrics agree with the direct formulas on random pairs") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 25; ++t) {
    const HsiCube x = random_cube(gen, 8, 8, 5, 0.05, 1.0), y = random_cube(gen, 8, 8, 5, 0.05, 1.0);
    const MetricReport r = evaluate(x, y, 4.0);
    CHECK(rel_err(r.rmse, oracle::rmse(x, y)) < 1e-10);
    CHECK(rel_err(r.psnr_db, oracle::psnr(x, y)) < 1e-10);
    CHECK(rel_err(r.ssim, oracle::ssim(x, y)) < 1e-10);
    CHECK(rel_err(r.uiqi, oracle::uiqi(x, y)) < 1e-10);
    CHECK(rel_err(r.ergas, oracle::ergas(x, y, 4.0)) < 1e-10);
    CHECK(rel_err(r.sam_deg, oracle::sam(x, y)) < 1e-10);
    CHECK(r.ssim >= -1.0);
    CHECK(r.ssim <= 1.0);
    CHECK(r.uiqi >= -1.0);
    CHECK(r.uiqi <= 1.0);
    CHECK(r.sam_deg <= 180.0);
  }
}
