#include <algorithm>
#include <atomic>
#include <thread>

#include "spectralift/error.hpp"
#include "spectralift/pipeline.hpp"

namespace spectralift {
namespace {

// Runs the network on pixels [begin, end) of `msi`, writing into `out`.
void infer_range(const SinParams& params, const MsiImage& msi, std::size_t begin, std::size_t end, HsiCube& out) {
  const std::size_t c = msi.bands();
  const std::size_t C = params.arch().out_bands;
  std::vector<double> batch((end - begin) * c);
  const auto src = msi.data().subspan(begin * c, (end - begin) * c);
  std::copy(src.begin(), src.end(), batch.begin());
  const std::vector<double> pred = forward(params, SpectraView{batch, end - begin, c});
  auto dst = out.mutable_data().subspan(begin * C, (end - begin) * C);
  std::transform(pred.begin(), pred.end(), dst.begin(), [](double v) { return static_cast<float>(v); });
}

void check_bands(const SinParams& params, const MsiImage& msi) {
  if (msi.bands() != params.arch().in_bands) {
    throw DimensionError("infer: HR-MSI has " + std::to_string(msi.bands()) + " bands, network expects " +
                         std::to_string(params.arch().in_bands));
  }
}

}  // namespace

HsiCube infer(const SinParams& params, const MsiImage& hr_msi, const InferOptions& opts) {
  check_bands(params, hr_msi);
  HsiCube out(hr_msi.height(), hr_msi.width(), params.arch().out_bands);
  const std::size_t n = hr_msi.pixels();
  const std::size_t tile = std::max<std::size_t>(1, opts.tile_pixels);
  const std::size_t tiles = (n + tile - 1) / tile;
  const std::size_t threads = std::clamp<std::size_t>(opts.threads, 1, std::max<std::size_t>(1, tiles));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < tiles; t = next++) {
      infer_range(params, hr_msi, t * tile, std::min(n, (t + 1) * tile), out);
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  out.validate();
  return out;
}

HsiCube infer_tiled(const SinParams& params, const MsiImage& hr_msi, std::size_t tiles_y, std::size_t tiles_x) {
  check_bands(params, hr_msi);
  if (tiles_y == 0 || tiles_x == 0 || tiles_y > hr_msi.height() || tiles_x > hr_msi.width()) {
    throw ParameterError("infer_tiled: invalid tile grid");
  }
  const std::size_t C = params.arch().out_bands;
  HsiCube out(hr_msi.height(), hr_msi.width(), C);
  for (std::size_t ty = 0; ty < tiles_y; ++ty) {
    for (std::size_t tx = 0; tx < tiles_x; ++tx) {
      const std::size_t r0 = hr_msi.height() * ty / tiles_y;
      const std::size_t r1 = hr_msi.height() * (ty + 1) / tiles_y;
      const std::size_t c0 = hr_msi.width() * tx / tiles_x;
      const std::size_t c1 = hr_msi.width() * (tx + 1) / tiles_x;
      const HsiCube part = infer(params, crop(hr_msi, CropRegion{r0, c0, r1 - r0, c1 - c0}));
      for (std::size_t i = r0; i < r1; ++i) {
        for (std::size_t j = c0; j < c1; ++j) {
          const auto src = part.pixel(i - r0, j - c0);
          std::copy(src.begin(), src.end(), out.pixel(i * out.width() + j).begin());
        }
      }
    }
  }
  return out;
}

TrainResult train_stage(const FusionSource& source, const SrfMatrix& srf, const Architecture& arch,
                        const TrainConfig& cfg) {
  return train(source.lr_hsi(), srf, arch, cfg);
}

HsiCube infer_stage(const FusionSource& source, const SinParams& params, const InferOptions& opts) {
  return infer(params, source.hr_msi(), opts);
}

}  // namespace spectralift
