#pragma once

// Experiment orchestration: crops, inference, the degradation grid and the
// ablation harness.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spectralift/cube.hpp"
#include "spectralift/degrade.hpp"
#include "spectralift/metrics.hpp"
#include "spectralift/optim.hpp"
#include "spectralift/sin.hpp"

namespace spectralift {

// ---------------------------------------------------------------------------
// Crops

struct CropRegion {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  friend bool operator==(const CropRegion&, const CropRegion&) = default;
};

enum class CropPolicy {
  Multiple32,  // both crops multiples of 32; test strip >= 32 columns
  Quarter,     // test strip = floor(W / 4) columns, no alignment constraint
};

std::string_view crop_policy_name(CropPolicy p);
CropPolicy parse_crop_policy(std::string_view name);

struct CropSplit {
  CropRegion train;
  CropRegion test;  // right-edge strip
};

CropSplit crop_split(const CubeShape& shape, CropPolicy policy);

template <class Tag>
BasicCube<Tag> crop(const BasicCube<Tag>& cube, const CropRegion& region) {
  if (region.row + region.height > cube.height() || region.col + region.width > cube.width()) {
    throw DimensionError("crop: region exceeds image " + to_string(cube.shape()));
  }
  std::vector<float> data;
  data.reserve(region.height * region.width * cube.bands());
  for (std::size_t i = 0; i < region.height; ++i) {
    const auto first = cube.pixel(region.row + i, region.col);
    data.insert(data.end(), first.data(), first.data() + region.width * cube.bands());
  }
  return BasicCube<Tag>(CubeShape{region.height, region.width, cube.bands()}, std::move(data));
}

// ---------------------------------------------------------------------------
// Inference

struct InferOptions {
  std::size_t tile_pixels = 4096;
  std::size_t threads = 1;
};

/// Applies the network independently to every pixel of the HR-MSI. Output is
/// not clipped; clip when saving.
HsiCube infer(const SinParams& params, const MsiImage& hr_msi, const InferOptions& opts = {});

/// Splits the image into tiles_y x tiles_x rectangles, infers each rectangle
/// on its own and stitches the results.
HsiCube infer_tiled(const SinParams& params, const MsiImage& hr_msi, std::size_t tiles_y, std::size_t tiles_x);

/// The two observations of one fusion problem. Training may only read the
/// LR-HSI and inference may only read the HR-MSI; the stage functions below
/// go through this interface so tests can audit the accesses.
class FusionSource {
 public:
  virtual ~FusionSource() = default;
  virtual const HsiCube& lr_hsi() const = 0;
  virtual const MsiImage& hr_msi() const = 0;
};

class PairSource final : public FusionSource {
 public:
  explicit PairSource(const DegradedPair& pair) : pair_(pair) {}
  const HsiCube& lr_hsi() const override { return pair_.lr_hsi; }
  const MsiImage& hr_msi() const override { return pair_.hr_msi; }

 private:
  const DegradedPair& pair_;
};

TrainResult train_stage(const FusionSource& source, const SrfMatrix& srf, const Architecture& arch,
                        const TrainConfig& cfg);
HsiCube infer_stage(const FusionSource& source, const SinParams& params, const InferOptions& opts = {});

// ---------------------------------------------------------------------------
// Synthetic scenes

/// Smooth nonnegative endmember spectra (rows) of length `bands`.
std::vector<std::vector<double>> make_endmembers(std::size_t count, std::size_t bands, std::uint64_t seed);

/// H x W x C scene whose pixels are convex combinations of `endmembers`
/// smooth spectra with spatially smooth abundances, normalized to [0,1].
HsiCube make_manifold_scene(std::size_t height, std::size_t width, std::size_t bands, std::size_t endmembers,
                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Experiment configuration

struct SceneSource {
  std::filesystem::path path;     // .slc cube, or raw payload when `sidecar` is set
  std::filesystem::path sidecar;  // JSON sidecar for raw import
  std::string synthetic;          // "manifold" generates a scene instead of loading one
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t bands = 31;
  std::size_t endmembers = 3;
  std::uint64_t seed = 7;
  std::string name = "scene";
};

enum class SrfSourceKind { Gaussian, File, Identity };

struct SrfSource {
  SrfSourceKind kind = SrfSourceKind::Gaussian;
  double fwhm_scale = 1.0;
  std::filesystem::path path;
};

/// One degradation of the grid. msi_bands is ignored for File/Identity SRFs.
struct GridEntry {
  PsfKind psf = PsfKind::defaults(PsfFamily::Gaussian);
  std::size_t r = 4;
  double hsi_snr_db = 35.0;
  std::size_t msi_bands = 4;
  double msi_snr_db = 40.0;
};

/// 10 PSFs x 8 (r, b) configurations with the paired HSI SNRs and 40 dB MSI noise.
std::vector<GridEntry> standard_grid();
std::vector<GridEntry> standard_grid(const std::vector<PsfFamily>& psfs);

struct ExperimentConfig {
  SceneSource scene;
  bool normalize = true;
  std::vector<GridEntry> grid = standard_grid();
  SrfSource srf;
  Architecture arch;
  TrainConfig train;
  CropPolicy crop = CropPolicy::Multiple32;
  std::size_t psf_size = kDefaultPsfSize;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool strict = false;
  bool save_outputs = false;  // write per-config estimates and parameter files
};

HsiCube load_scene(const SceneSource& scene, bool normalize);
SrfMatrix build_srf(const SrfSource& source, std::size_t hsi_bands, std::size_t msi_bands);

// ---------------------------------------------------------------------------
// Grid and ablation

struct GridRow {
  std::size_t config_id = 0;
  std::string scene;
  std::string psf;
  std::size_t r = 0;
  std::size_t msi_bands = 0;
  double hsi_snr_db = 0.0;
  double msi_snr_db = 0.0;
  std::string method = "SpectraLift";
  std::string variant = "baseline";
  MetricReport metrics;
  std::size_t parameters = 0;
  CropRegion test_region;
  bool ok = false;
  std::string error;
  double train_ms = 0.0;
  double infer_ms = 0.0;
};

struct GridResult {
  std::vector<GridRow> rows;  // ordered by config_id
  MetricReport mean;          // arithmetic mean over successful rows
  double mean_parameters = 0.0;
  std::size_t succeeded = 0;
};

/// Degrade -> train on the full LR-HSI -> infer on the HR-MSI -> score the test crop.
GridRow run_config(const HsiCube& gt, const GridEntry& entry, const ExperimentConfig& cfg, std::size_t config_id);

GridResult run_grid(const ExperimentConfig& cfg);
GridResult run_grid(const HsiCube& gt, const ExperimentConfig& cfg);

MetricReport mean_report(const std::vector<GridRow>& rows);

struct AblationVariant {
  std::string name;
  Architecture arch;
  TrainConfig train;
};

/// The 14 architecture/training variants, derived from the base config.
std::vector<AblationVariant> ablation_variants(const Architecture& base_arch, const TrainConfig& base_train);

/// Mean parameter count of `arch` over the MSI band counts of `entries` for a
/// C-band scene (each grid configuration trains its own network).
double mean_parameter_count(Architecture arch, std::size_t hsi_bands, const std::vector<GridEntry>& entries);

struct AblationRow {
  std::string variant;
  MetricReport mean;
  double mean_parameters = 0.0;
  std::size_t succeeded = 0;
  std::size_t configs = 0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::vector<GridRow> details;
};

/// Parameter-count-only plan for a C-band scene over the Gaussian-PSF grid subset.
std::vector<AblationRow> plan_ablation(const ExperimentConfig& cfg, std::size_t hsi_bands);

AblationResult run_ablation(const ExperimentConfig& cfg);
AblationResult run_ablation(const HsiCube& gt, const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Reports

std::string grid_csv(const GridResult& result);
std::string grid_json(const GridResult& result);
std::string timing_csv(const std::vector<GridRow>& rows);
std::string ablation_csv(const AblationResult& result);
std::string ablation_json(const AblationResult& result);
std::string report_csv_row(const MetricReport& m);

/// Writes results.csv, results.json, timing.csv and manifest.json into cfg.out_dir.
void write_grid_outputs(const GridResult& result, const ExperimentConfig& cfg);
void write_ablation_outputs(const AblationResult& result, const ExperimentConfig& cfg);

}  // namespace spectralift
