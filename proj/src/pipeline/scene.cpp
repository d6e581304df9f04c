#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectralift/error.hpp"
#include "spectralift/pipeline.hpp"
#include "spectralift/rng.hpp"

namespace spectralift {

std::vector<std::vector<double>> make_endmembers(std::size_t count, std::size_t bands, std::uint64_t seed) {
  if (count == 0 || bands == 0) throw ParameterError("make_endmembers: count and bands must be >= 1");
  rng::Engine engine(rng::derive_seed(seed, "endmembers"));
  const double span = static_cast<double>(std::max<std::size_t>(bands - 1, 1));
  std::vector<std::vector<double>> out(count, std::vector<double>(bands));
  for (auto& spectrum : out) {
    // Baseline with a linear trend plus three Gaussian absorption/reflection features.
    const double base = engine.uniform(0.15, 0.45);
    const double slope = engine.uniform(-0.3, 0.3);
    double centers[3], widths[3], heights[3];
    for (int q = 0; q < 3; ++q) {
      centers[q] = engine.uniform(0.0, 1.0);
      widths[q] = engine.uniform(0.08, 0.25);
      heights[q] = engine.uniform(-0.25, 0.5);
    }
    for (std::size_t b = 0; b < bands; ++b) {
      const double t = static_cast<double>(b) / span;
      double v = base + slope * (t - 0.5);
      for (int q = 0; q < 3; ++q) {
        const double d = (t - centers[q]) / widths[q];
        v += heights[q] * std::exp(-0.5 * d * d);
      }
      spectrum[b] = std::clamp(v, 0.02, 1.0);
    }
  }
  return out;
}

HsiCube make_manifold_scene(std::size_t height, std::size_t width, std::size_t bands, std::size_t endmembers,
                            std::uint64_t seed) {
  if (height == 0 || width == 0) throw ParameterError("make_manifold_scene: empty scene");
  const auto spectra = make_endmembers(endmembers, bands, seed);
  rng::Engine engine(rng::derive_seed(seed, "abundances"));

  // Each endmember gets a smooth random field (sum of low-frequency plane waves);
  // a softmax over the fields gives positive abundances that sum to one.
  constexpr int kWaves = 4;
  struct Wave {
    double fy, fx, phase, amp;
  };
  std::vector<std::vector<Wave>> fields(endmembers);
  for (auto& f : fields) {
    for (int q = 0; q < kWaves; ++q) {
      f.push_back({engine.uniform(-3.0, 3.0), engine.uniform(-3.0, 3.0), engine.uniform(0.0, 2.0 * std::numbers::pi),
                   engine.uniform(0.5, 1.5)});
    }
  }

  std::vector<float> data(height * width * bands);
  std::vector<double> logits(endmembers);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const double y = static_cast<double>(i) / static_cast<double>(height);
      const double x = static_cast<double>(j) / static_cast<double>(width);
      double max_logit = -1e300;
      for (std::size_t e = 0; e < endmembers; ++e) {
        double v = 0.0;
        for (const Wave& w : fields[e]) v += w.amp * std::sin(2.0 * std::numbers::pi * (w.fy * y + w.fx * x) + w.phase);
        logits[e] = 1.5 * v;
        max_logit = std::max(max_logit, logits[e]);
      }
      double z = 0.0;
      for (double& l : logits) z += (l = std::exp(l - max_logit));
      float* px = data.data() + (i * width + j) * bands;
      for (std::size_t b = 0; b < bands; ++b) {
        double v = 0.0;
        for (std::size_t e = 0; e < endmembers; ++e) v += logits[e] / z * spectra[e][b];
        px[b] = static_cast<float>(v);
      }
    }
  }
  return normalize_cube(HsiCube(CubeShape{height, width, bands}, std::move(data)));
}

}  // namespace spectralift
