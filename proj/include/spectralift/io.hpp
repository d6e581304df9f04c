#pragma once

// On-disk formats.
//
// Cube file (".slc"), all integers little-endian:
//   offset  0  char[4]  magic "SLC1"
//   offset  4  u32      height
//   offset  8  u32      width
//   offset 12  u32      bands
//   offset 16  u8       dtype code (1 = float32)
//   offset 17  u8       endianness (0 = little)
//   offset 18  u16      reserved, 0
//   offset 20  payload  height*width*bands float32, band-interleaved-by-pixel
//
// Parameter file (".slp"):
//   "SLP1", u32 version (1), u32 in_bands, u32 out_bands, u32 hidden_width,
//   u32 hidden_layers, u8 activation, u8 skip, u16 reserved, f64 leaky_slope,
//   u64 parameter count, then float32 parameters in layer order
//   (each layer: input-major weights, then bias).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spectralift/cube.hpp"
#include "spectralift/sin.hpp"

namespace spectralift::io {

inline constexpr std::size_t kCubeHeaderBytes = 20;
inline constexpr std::uint32_t kParamsVersion = 1;

struct RawCube {
  CubeShape shape;
  std::vector<float> data;
};

void write_cube_file(const std::filesystem::path& path, const CubeShape& shape, std::span<const float> data);
RawCube read_cube_file(const std::filesystem::path& path);

struct SaveOptions {
  bool clip_unit_range = false;  // clamp to [0,1]; used for final reconstructions only
};

template <class Tag>
void save_cube(const BasicCube<Tag>& cube, const std::filesystem::path& path, const SaveOptions& opts = {}) {
  if (!opts.clip_unit_range) {
    write_cube_file(path, cube.shape(), cube.data());
    return;
  }
  std::vector<float> clipped(cube.data().begin(), cube.data().end());
  for (float& v : clipped) v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  write_cube_file(path, cube.shape(), clipped);
}

template <class Tag = HsiTag>
BasicCube<Tag> load_cube(const std::filesystem::path& path) {
  RawCube raw = read_cube_file(path);
  return BasicCube<Tag>(raw.shape, std::move(raw.data));
}

/// Imports a headerless array described by a JSON sidecar:
///   {"height": H, "width": W, "bands": C, "dtype": "float32"|"float64"|"uint16"|"int16"|"uint8",
///    "interleave": "bip"|"bil"|"bsq", "byte_order": "little"|"big", "header_offset": 0}
/// Only height/width/bands are required.
HsiCube import_raw(const std::filesystem::path& payload, const std::filesystem::path& sidecar);

/// SRF as plain CSV: C rows x c columns of decimals. Columns are normalized on load.
SrfMatrix read_srf_csv(const std::filesystem::path& path);
void write_srf_csv(const SrfMatrix& srf, const std::filesystem::path& path);

void save_params(const SinParams& params, const std::filesystem::path& path);
SinParams load_params(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace spectralift::io
