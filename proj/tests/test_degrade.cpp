#include <cmath>
#include <random>

#include "doctest.h"
#include "spectralift/degrade.hpp"
#include "spectralift/error.hpp"
#include "spectralift/pipeline.hpp"
#include "support.hpp"

using namespace spectralift;
using testsupport::random_cube;

namespace {

bool radially_defined(PsfFamily f) { return f != PsfFamily::Hermite && f != PsfFamily::Gabor; }

}  // namespace

TEST_CASE("every psf family is a valid kernel with the expected symmetry") {
  for (PsfFamily f : kAllPsfFamilies) {
    CAPTURE(psf_name(f));
    const PsfKernel k = make_psf(PsfKind::defaults(f), 15);
    double sum = 0.0, lo = 1.0;
    for (double w : k.weights()) {
      sum += w;
      lo = std::min(lo, w);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(lo >= 0.0);
    for (std::size_t i = 0; i < 15; ++i) {
      for (std::size_t j = 0; j < 15; ++j) {
        // Every family is symmetric about both axes.
        CHECK(k(i, j) == doctest::Approx(k(14 - i, j)).epsilon(1e-12));
        CHECK(k(i, j) == doctest::Approx(k(i, 14 - j)).epsilon(1e-12));
        if (radially_defined(f)) CHECK(k(i, j) == doctest::Approx(k(j, i)).epsilon(1e-12));
      }
    }
    CHECK(parse_psf(psf_name(f)) == f);
  }
}

TEST_CASE("psf examples") {
  const PsfKernel delta = make_psf(PsfKind::defaults(PsfFamily::Delta), 15);
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = 0; j < 15; ++j) CHECK(delta(i, j) == (i == 7 && j == 7 ? 1.0 : 0.0));

  const PsfKernel g = make_psf(PsfKind{PsfFamily::Gaussian, 2.0, 0.0}, 15);
  double total = 0.0;
  for (std::size_t i = 0; i < 15; ++i)
    for (std::size_t j = 0; j < 15; ++j) total += std::exp(-((i - 7.0) * (i - 7.0) + (j - 7.0) * (j - 7.0)) / 8.0);
  CHECK(g(7, 7) == doctest::Approx(1.0 / total).epsilon(1e-12));
  CHECK(g(3, 5) == doctest::Approx(std::exp(-(16.0 + 4.0) / 8.0) / total).epsilon(1e-12));
  CHECK(*std::max_element(g.weights().begin(), g.weights().end()) == g(7, 7));

  CHECK_THROWS_AS(make_psf(PsfKind{PsfFamily::Gaussian, 0.0, 0.0}, 15), ParameterError);
  CHECK_THROWS_AS(make_psf(PsfKind{PsfFamily::Moffat, 3.0, -1.0}, 15), ParameterError);
  CHECK_THROWS_AS(make_psf(PsfKind::defaults(PsfFamily::Airy), 14), ParameterError);
  CHECK_THROWS_AS(parse_psf("boxcar"), ParameterError);
}

TEST_CASE("blur_per_band matches the padded-image reference") {
  std::mt19937_64 gen(5);
  const HsiCube x = random_cube(gen, 6, 6, 2);
  const PsfKernel k = testsupport::random_psf(gen, 3);
  const auto ref = testsupport::oracle::blur(x, k);
  const HsiCube y = blur_per_band(x, k);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(y.data()[i] - ref[i]) < 1e-6);
}

TEST_CASE("blur_per_band identities and errors") {
  std::mt19937_64 gen(6);
  const HsiCube x = random_cube(gen, 16, 15, 3);
  CHECK(blur_per_band(x, make_psf(PsfKind::defaults(PsfFamily::Delta))) == x);

  const HsiCube flat(16, 16, 2, 0.625f);
  for (PsfFamily f : kAllPsfFamilies) {
    const HsiCube b = blur_per_band(flat, make_psf(PsfKind::defaults(f)));
    for (float v : b.data()) CHECK(std::abs(v - 0.625) < 1e-6);
  }
  CHECK_THROWS_AS(blur_per_band(HsiCube(7, 7, 1, 0.5f), make_psf(PsfKind::defaults(PsfFamily::Gaussian))),
                  DimensionError);
}

TEST_CASE("blur commutes with spectral projection") {
  std::mt19937_64 gen(7);
  const HsiCube x = random_cube(gen, 16, 16, 6);
  const SrfMatrix r = testsupport::random_srf(gen, 6, 3);
  const PsfKernel k = make_psf(PsfKind::defaults(PsfFamily::Moffat));
  const MsiImage a = spectral_project(blur_per_band(x, k), r);
  const MsiImage b = blur_per_band(spectral_project(x, r), k);
  for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) < 1e-6);
}

TEST_CASE("downsample examples") {
  std::vector<float> v(64);
  for (std::size_t i = 0; i < 64; ++i) v[i] = static_cast<float>(i);
  const HsiCube c(CubeShape{8, 8, 1}, v);
  const HsiCube d = downsample(c, 4);
  CHECK(d.shape() == CubeShape{2, 2, 1});
  CHECK(d.at(0, 0, 0) == 0.f);
  CHECK(d.at(0, 1, 0) == 4.f);
  CHECK(d.at(1, 0, 0) == 32.f);
  CHECK(d.at(1, 1, 0) == 36.f);
  CHECK(downsample(c, 1) == c);
  CHECK_THROWS_AS(downsample(c, 3), DimensionError);

  const HsiCube flat(32, 32, 3, 0.2f);
  const HsiCube bd = downsample(blur_per_band(flat, make_psf(PsfKind::defaults(PsfFamily::Airy))), 8);
  for (float x : bd.data()) CHECK(std::abs(x - 0.2) < 1e-6);
}

TEST_CASE("add_awgn") {
  std::mt19937_64 gen(8);
  const HsiCube x = random_cube(gen, 4, 4, 3);
  CHECK(add_awgn(x, kNoNoise, 1) == x);
  CHECK(add_awgn(x, 20.0, 99) == add_awgn(x, 20.0, 99));
  CHECK_FALSE(add_awgn(x, 20.0, 99) == add_awgn(x, 20.0, 100));
  CHECK_THROWS_AS(add_awgn(HsiCube(2, 2, 2, 0.0f), 20.0, 1), DegenerateInputError);

  // Unit-power cube, 2^19 samples: realized SNR within 0.2 dB of the request.
  std::vector<float> data(256 * 256 * 8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& v : data) v = static_cast<float>(n(gen));
  const HsiCube big(CubeShape{256, 256, 8}, data);
  const HsiCube noisy = add_awgn(big, 20.0, 42);
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ps += static_cast<double>(data[i]) * data[i];
    const double e = static_cast<double>(noisy.data()[i]) - data[i];
    pn += e * e;
  }
  CHECK(std::abs(10.0 * std::log10(ps / pn) - 20.0) < 0.2);
}

TEST_CASE("gaussian srf") {
  const SrfMatrix one = make_gaussian_srf(31, 1);
  CHECK(one.cols() == 1);
  double s = 0.0;
  for (std::size_t n = 0; n < 31; ++n) {
    CHECK(one(n, 0) > 0.0);
    s += one(n, 0);
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));

  const SrfMatrix four = make_gaussian_srf(31, 4);
  CHECK(srf_band_centers(four) == std::vector<std::size_t>{0, 10, 20, 30});

  const SrfMatrix narrow = make_gaussian_srf(8, 8, 1e-3);
  for (std::size_t n = 0; n < 8; ++n)
    for (std::size_t m = 0; m < 8; ++m) CHECK(narrow(n, m) == doctest::Approx(n == m ? 1.0 : 0.0).epsilon(1e-9));

  CHECK_THROWS_AS(make_gaussian_srf(4, 5), ParameterError);
  CHECK_THROWS_AS(make_gaussian_srf(4, 0), ParameterError);
}

TEST_CASE("wald_degrade") {
  std::mt19937_64 gen(9);
  const HsiCube gt = random_cube(gen, 16, 16, 5);

  DegradationSpec id;
  id.psf = PsfKind::defaults(PsfFamily::Delta);
  id.r = 1;
  id.hsi_snr_db = kNoNoise;
  id.msi_snr_db = kNoNoise;
  id.srf = SrfMatrix::identity(5);
  const DegradedPair p = wald_degrade(gt, id);
  CHECK(p.lr_hsi == gt);
  CHECK(std::equal(gt.data().begin(), gt.data().end(), p.hr_msi.data().begin(), p.hr_msi.data().end()));

  const HsiCube scene = make_manifold_scene(64, 64, 31, 3, 1);
  DegradationSpec s;
  s.psf = PsfKind::defaults(PsfFamily::Gaussian);
  s.r = 4;
  s.hsi_snr_db = 35.0;
  s.srf = make_gaussian_srf(31, 4);
  s.seed = 123;
  const DegradedPair q = wald_degrade(scene, s);
  CHECK(q.lr_hsi.shape() == CubeShape{16, 16, 31});
  CHECK(q.hr_msi.shape() == CubeShape{64, 64, 4});
  const DegradedPair q2 = wald_degrade(scene, s);
  CHECK(q.lr_hsi == q2.lr_hsi);
  CHECK(q.hr_msi == q2.hr_msi);

  // Out-of-range ground truth is rejected.
  CHECK_THROWS(wald_degrade(random_cube(gen, 8, 8, 5, 0.0, 2.0), id));
}

TEST_CASE("standard grid has 80 pairs with the paired noise levels") {
  const auto grid = standard_grid();
  CHECK(grid.size() == 80);
  for (const auto& e : grid) {
    CHECK(e.hsi_snr_db == paired_hsi_snr_db(e.r));
    CHECK(e.msi_snr_db == 40.0);
  }
  CHECK(paired_hsi_snr_db(4) == 35.0);
  CHECK(paired_hsi_snr_db(32) == 20.0);
  CHECK_THROWS_AS(paired_hsi_snr_db(5), ParameterError);
}
