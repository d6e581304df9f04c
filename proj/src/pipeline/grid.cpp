#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "spectralift/config.hpp"
#include "spectralift/error.hpp"
#include "spectralift/io.hpp"
#include "spectralift/pipeline.hpp"
#include "spectralift/rng.hpp"

namespace spectralift {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::size_t msi_bands_for(const GridEntry& entry, const SrfSource& srf, std::size_t hsi_bands) {
  switch (srf.kind) {
    case SrfSourceKind::Gaussian:
      return entry.msi_bands;
    case SrfSourceKind::Identity:
      return hsi_bands;
    case SrfSourceKind::File:
      return io::read_srf_csv(srf.path).cols();
  }
  return entry.msi_bands;
}

// Runs `fn(i)` for i in [0, n) on up to `workers` threads. Each index is
// handled by exactly one thread, so writes to slot i need no locking.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Infers a small window straddling the image center on its own and checks it
// against the corresponding pixels of the whole-image result.
void check_tiling(const SinParams& params, const MsiImage& msi, const HsiCube& whole) {
  const std::size_t h = std::min<std::size_t>(2, msi.height());
  const std::size_t w = std::min<std::size_t>(2, msi.width());
  const CropRegion window{(msi.height() - h) / 2, (msi.width() - w) / 2, h, w};
  const HsiCube part = infer(params, crop(msi, window));
  if (part != crop(whole, window)) {
    throw NumericError("tiled inference differs from whole-image inference at rows " + std::to_string(window.row) +
                       ".." + std::to_string(window.row + h) + ", cols " + std::to_string(window.col) + ".." +
                       std::to_string(window.col + w));
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

std::string fmt(double v) { return format_metric(v); }

std::string params_millions(double count) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", count / 1e6);
  return buf;
}

nlohmann::json row_json(const GridRow& r) {
  nlohmann::json j = {{"config_id", r.config_id},
                      {"scene", r.scene},
                      {"psf", r.psf},
                      {"r", r.r},
                      {"msi_bands", r.msi_bands},
                      {"hsi_snr_db", std::isinf(r.hsi_snr_db) ? nlohmann::json("inf") : nlohmann::json(r.hsi_snr_db)},
                      {"msi_snr_db", std::isinf(r.msi_snr_db) ? nlohmann::json("inf") : nlohmann::json(r.msi_snr_db)},
                      {"method", r.method},
                      {"variant", r.variant},
                      {"parameters", r.parameters},
                      {"test_region",
                       {{"row", r.test_region.row},
                        {"col", r.test_region.col},
                        {"height", r.test_region.height},
                        {"width", r.test_region.width}}},
                      {"ok", r.ok}};
  if (r.ok) j["metrics"] = metrics_to_json(r.metrics);
  else j["error"] = r.error;
  return j;
}

std::vector<GridEntry> gaussian_subset(const std::vector<GridEntry>& grid) {
  std::vector<GridEntry> out;
  for (const auto& e : grid) {
    if (e.psf.family == PsfFamily::Gaussian) out.push_back(e);
  }
  if (out.empty()) throw ParameterError("ablation: the grid has no Gaussian-PSF configurations");
  return out;
}

}  // namespace

std::string_view crop_policy_name(CropPolicy p) {
  return p == CropPolicy::Multiple32 ? "multiple32" : "quarter";
}

CropPolicy parse_crop_policy(std::string_view name) {
  if (name == "multiple32") return CropPolicy::Multiple32;
  if (name == "quarter") return CropPolicy::Quarter;
  throw ParameterError("unknown crop policy '" + std::string(name) + "' (expected multiple32 or quarter)");
}

CropSplit crop_split(const CubeShape& shape, CropPolicy policy) {
  const std::size_t H = shape.height;
  const std::size_t W = shape.width;
  std::size_t test_w = 0;
  if (policy == CropPolicy::Multiple32) {
    if (H % 32 != 0 || W % 32 != 0 || H < 32 || W < 64) {
      throw DimensionError("crop_split: " + to_string(shape) +
                           " cannot be split into multiple-of-32 crops (need H, W multiples of 32 and W >= 64)");
    }
    const double quarter_blocks = static_cast<double>(W) / 4.0 / 32.0;
    test_w = std::max<std::size_t>(32, 32 * static_cast<std::size_t>(std::llround(quarter_blocks)));
  } else {
    test_w = W / 4;
    if (test_w == 0 || H == 0) throw DimensionError("crop_split: " + to_string(shape) + " is too small to split");
  }
  CropSplit split;
  split.train = CropRegion{0, 0, H, W - test_w};
  split.test = CropRegion{0, W - test_w, H, test_w};
  return split;
}

std::vector<GridEntry> standard_grid() {
  return standard_grid(std::vector<PsfFamily>(kAllPsfFamilies.begin(), kAllPsfFamilies.end()));
}

std::vector<GridEntry> standard_grid(const std::vector<PsfFamily>& psfs) {
  std::vector<GridEntry> grid;
  for (PsfFamily family : psfs) {
    for (const auto& [r, b] : kGridRatioBands) {
      GridEntry e;
      e.psf = PsfKind::defaults(family);
      e.r = r;
      e.hsi_snr_db = paired_hsi_snr_db(r);
      e.msi_bands = b;
      e.msi_snr_db = 40.0;
      grid.push_back(e);
    }
  }
  return grid;
}

HsiCube load_scene(const SceneSource& scene, bool normalize) {
  HsiCube cube = [&] {
    if (!scene.synthetic.empty()) {
      if (scene.synthetic != "manifold") throw ParameterError("unknown synthetic scene '" + scene.synthetic + "'");
      return make_manifold_scene(scene.height, scene.width, scene.bands, scene.endmembers, scene.seed);
    }
    if (scene.path.empty()) throw ParameterError("no scene given: set scene.path or scene.synthetic");
    if (!scene.sidecar.empty()) return io::import_raw(scene.path, scene.sidecar);
    return io::load_cube<HsiTag>(scene.path);
  }();
  return normalize ? normalize_cube(cube) : cube;
}

SrfMatrix build_srf(const SrfSource& source, std::size_t hsi_bands, std::size_t msi_bands) {
  switch (source.kind) {
    case SrfSourceKind::Gaussian:
      return make_gaussian_srf(hsi_bands, msi_bands, source.fwhm_scale);
    case SrfSourceKind::Identity:
      return SrfMatrix::identity(hsi_bands);
    case SrfSourceKind::File: {
      SrfMatrix srf = io::read_srf_csv(source.path);
      if (srf.rows() != hsi_bands) {
        throw DimensionError("SRF file " + source.path.string() + " has " + std::to_string(srf.rows()) +
                             " rows, scene has " + std::to_string(hsi_bands) + " bands");
      }
      return srf;
    }
  }
  throw ParameterError("build_srf: bad SRF kind");
}

GridRow run_config(const HsiCube& gt, const GridEntry& entry, const ExperimentConfig& cfg, std::size_t config_id) {
  GridRow row;
  row.config_id = config_id;
  row.scene = cfg.scene.name;
  row.psf = std::string(psf_name(entry.psf.family));
  row.r = entry.r;
  row.hsi_snr_db = entry.hsi_snr_db;
  row.msi_snr_db = entry.msi_snr_db;
  row.msi_bands = entry.msi_bands;
  try {
    const CropSplit split = crop_split(gt.shape(), cfg.crop);
    row.test_region = split.test;

    const std::uint64_t seed = rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(config_id));
    DegradationSpec spec;
    spec.psf = entry.psf;
    spec.r = entry.r;
    spec.hsi_snr_db = entry.hsi_snr_db;
    spec.srf = build_srf(cfg.srf, gt.bands(), entry.msi_bands);
    spec.msi_snr_db = entry.msi_snr_db;
    spec.seed = rng::derive_seed(seed, "degrade");
    spec.psf_size = cfg.psf_size;
    row.msi_bands = spec.srf.cols();

    const DegradedPair pair = wald_degrade(gt, spec);
    const PairSource source(pair);

    TrainConfig tc = cfg.train;
    tc.seed = rng::derive_seed(seed, "train");
    tc.strict = tc.strict || cfg.strict;
    auto t0 = Clock::now();
    const TrainResult trained = train_stage(source, spec.srf, cfg.arch, tc);
    row.train_ms = ms_since(t0);
    row.parameters = trained.params.arch().parameter_count();

    t0 = Clock::now();
    const HsiCube estimate = infer_stage(source, trained.params);
    row.infer_ms = ms_since(t0);
    check_tiling(trained.params, pair.hr_msi, estimate);

    row.metrics = evaluate(crop(gt, split.test), crop(estimate, split.test), static_cast<double>(entry.r));

    if (cfg.save_outputs) {
      const auto dir = cfg.out_dir / "estimates";
      std::filesystem::create_directories(dir);
      char stem[32];
      std::snprintf(stem, sizeof stem, "config_%03zu", config_id);
      io::save_cube(estimate, dir / (std::string(stem) + ".slc"), io::SaveOptions{true});
      io::save_params(trained.params, dir / (std::string(stem) + ".slp"));
      io::write_text(dir / (std::string(stem) + "_train_log.csv"), training_log_csv(trained.log));
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

GridResult run_grid(const ExperimentConfig& cfg) { return run_grid(load_scene(cfg.scene, cfg.normalize), cfg); }

GridResult run_grid(const HsiCube& gt, const ExperimentConfig& cfg) {
  GridResult result;
  result.rows.resize(cfg.grid.size());
  parallel_for(cfg.grid.size(), cfg.workers,
               [&](std::size_t i) { result.rows[i] = run_config(gt, cfg.grid[i], cfg, i); });
  result.mean = mean_report(result.rows);
  double params = 0.0;
  for (const auto& r : result.rows) {
    if (!r.ok) continue;
    ++result.succeeded;
    params += static_cast<double>(r.parameters);
  }
  result.mean_parameters = result.succeeded ? params / static_cast<double>(result.succeeded) : 0.0;
  return result;
}

MetricReport mean_report(const std::vector<GridRow>& rows) {
  MetricReport m;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (!r.ok) continue;
    if (n == 0) {
      m.max_value = r.metrics.max_value;
      m.ssim_c1 = r.metrics.ssim_c1;
      m.ssim_c2 = r.metrics.ssim_c2;
      m.sam_eps = r.metrics.sam_eps;
      m.sam_delta = r.metrics.sam_delta;
      m.r_ratio = 0.0;
    }
    ++n;
    m.rmse += r.metrics.rmse;
    m.psnr_db += r.metrics.psnr_db;
    m.ssim += r.metrics.ssim;
    m.uiqi += r.metrics.uiqi;
    m.ergas += r.metrics.ergas;
    m.sam_deg += r.metrics.sam_deg;
    m.r_ratio += r.metrics.r_ratio;
    m.uiqi_skipped_bands += r.metrics.uiqi_skipped_bands;
    m.ergas_skipped_bands += r.metrics.ergas_skipped_bands;
  }
  if (n == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    m.rmse = m.psnr_db = m.ssim = m.uiqi = m.ergas = m.sam_deg = nan;
    return m;
  }
  const double k = static_cast<double>(n);
  m.rmse /= k;
  m.psnr_db /= k;
  m.ssim /= k;
  m.uiqi /= k;
  m.ergas /= k;
  m.sam_deg /= k;
  m.r_ratio /= k;
  return m;
}

std::vector<AblationVariant> ablation_variants(const Architecture& base_arch, const TrainConfig& base_train) {
  std::vector<AblationVariant> v;
  auto add = [&](std::string name, auto&& edit) {
    AblationVariant var{std::move(name), base_arch, base_train};
    edit(var);
    v.push_back(std::move(var));
  };
  add("baseline", [](AblationVariant&) {});
  add("no_skip", [](AblationVariant& a) { a.arch.skip = false; });
  add("no_scheduler", [](AblationVariant& a) { a.train.schedule = ConstantLr{1e-3}; });
  add("mse", [](AblationVariant& a) { a.train.loss = LossKind::Mse; });
  add("cosine", [](AblationVariant& a) { a.train.loss = LossKind::Cosine; });
  add("relu", [](AblationVariant& a) { a.arch.activation = Activation::Relu; });
  add("gelu", [](AblationVariant& a) { a.arch.activation = Activation::Gelu; });
  for (std::size_t layers : {8, 4, 2, 1}) {
    add("hidden_" + std::to_string(layers), [layers](AblationVariant& a) { a.arch.hidden_layers = layers; });
  }
  add("width_32", [](AblationVariant& a) { a.arch.hidden_width = 32; });
  add("width_128", [](AblationVariant& a) { a.arch.hidden_width = 128; });
  add("linear_map", [](AblationVariant& a) { a.arch.hidden_layers = 0; });
  return v;
}

double mean_parameter_count(Architecture arch, std::size_t hsi_bands, const std::vector<GridEntry>& entries) {
  if (entries.empty()) throw ParameterError("mean_parameter_count: no grid entries");
  double total = 0.0;
  for (const auto& e : entries) {
    arch.in_bands = e.msi_bands;
    arch.out_bands = hsi_bands;
    total += static_cast<double>(arch.parameter_count());
  }
  return total / static_cast<double>(entries.size());
}

std::vector<AblationRow> plan_ablation(const ExperimentConfig& cfg, std::size_t hsi_bands) {
  std::vector<GridEntry> subset = gaussian_subset(cfg.grid);
  for (auto& e : subset) e.msi_bands = msi_bands_for(e, cfg.srf, hsi_bands);
  std::vector<AblationRow> rows;
  for (const auto& v : ablation_variants(cfg.arch, cfg.train)) {
    AblationRow row;
    row.variant = v.name;
    row.configs = subset.size();
    row.mean_parameters = mean_parameter_count(v.arch, hsi_bands, subset);
    rows.push_back(std::move(row));
  }
  return rows;
}

AblationResult run_ablation(const ExperimentConfig& cfg) {
  return run_ablation(load_scene(cfg.scene, cfg.normalize), cfg);
}

AblationResult run_ablation(const HsiCube& gt, const ExperimentConfig& cfg) {
  const std::vector<GridEntry> subset = gaussian_subset(cfg.grid);
  const auto variants = ablation_variants(cfg.arch, cfg.train);
  AblationResult result;
  result.rows = plan_ablation(cfg, gt.bands());
  result.details.resize(variants.size() * subset.size());
  // Variant v on configuration k reuses the degradation seed of configuration k,
  // so every variant sees exactly the same observations.
  parallel_for(result.details.size(), cfg.workers, [&](std::size_t idx) {
    const std::size_t v = idx / subset.size();
    const std::size_t k = idx % subset.size();
    ExperimentConfig vc = cfg;
    vc.arch = variants[v].arch;
    vc.train = variants[v].train;
    GridRow row = run_config(gt, subset[k], vc, k);
    row.variant = variants[v].name;
    result.details[idx] = std::move(row);
  });
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const std::vector<GridRow> rows(result.details.begin() + static_cast<std::ptrdiff_t>(v * subset.size()),
                                    result.details.begin() + static_cast<std::ptrdiff_t>((v + 1) * subset.size()));
    result.rows[v].mean = mean_report(rows);
    result.rows[v].succeeded = static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const GridRow& r) {
      return r.ok;
    }));
  }
  return result;
}

std::string report_csv_row(const MetricReport& m) {
  return fmt(m.rmse) + "," + fmt(m.psnr_db) + "," + fmt(m.ssim) + "," + fmt(m.uiqi) + "," + fmt(m.ergas) + "," +
         fmt(m.sam_deg);
}

std::string grid_csv(const GridResult& result) {
  std::ostringstream os;
  os << "config_id,scene,psf,r,msi_bands,hsi_snr_db,msi_snr_db,method,variant,parameters,"
        "test_row,test_col,test_height,test_width,ok,rmse,psnr_db,ssim,uiqi,ergas,sam_deg,error\n";
  auto write = [&](const GridRow& r) {
    os << r.config_id << ',' << csv_escape(r.scene) << ',' << r.psf << ',' << r.r << ',' << r.msi_bands << ','
       << fmt(r.hsi_snr_db) << ',' << fmt(r.msi_snr_db) << ',' << r.method << ',' << r.variant << ','
       << r.parameters << ',' << r.test_region.row << ',' << r.test_region.col << ',' << r.test_region.height << ','
       << r.test_region.width << ',' << (r.ok ? 1 : 0) << ',';
    if (r.ok) os << report_csv_row(r.metrics);
    else os << ",,,,,";
    os << ',' << csv_escape(r.error) << '\n';
  };
  for (const auto& r : result.rows) write(r);
  os << "mean,,,,,,,,," << fmt(result.mean_parameters) << ",,,,," << result.succeeded << ','
     << report_csv_row(result.mean) << ",\n";
  return os.str();
}

std::string grid_json(const GridResult& result) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : result.rows) j["rows"].push_back(row_json(r));
  j["mean"] = metrics_to_json(result.mean);
  j["mean_parameters"] = result.mean_parameters;
  j["succeeded"] = result.succeeded;
  j["configs"] = result.rows.size();
  return j.dump(2) + "\n";
}

std::string timing_csv(const std::vector<GridRow>& rows) {
  std::ostringstream os;
  os << "config_id,variant,train_ms,infer_ms\n";
  for (const auto& r : rows) os << r.config_id << ',' << r.variant << ',' << r.train_ms << ',' << r.infer_ms << '\n';
  return os.str();
}

std::string ablation_csv(const AblationResult& result) {
  std::ostringstream os;
  os << "variant,configs,succeeded,params_m,mean_parameters,rmse,psnr_db,ssim,uiqi,ergas,sam_deg\n";
  for (const auto& r : result.rows) {
    os << r.variant << ',' << r.configs << ',' << r.succeeded << ',' << params_millions(r.mean_parameters) << ','
       << fmt(r.mean_parameters) << ',' << report_csv_row(r.mean) << '\n';
  }
  return os.str();
}

std::string ablation_json(const AblationResult& result) {
  nlohmann::json j;
  j["variants"] = nlohmann::json::array();
  for (const auto& r : result.rows) {
    j["variants"].push_back({{"variant", r.variant},
                             {"configs", r.configs},
                             {"succeeded", r.succeeded},
                             {"mean_parameters", r.mean_parameters},
                             {"params_m", params_millions(r.mean_parameters)},
                             {"mean", metrics_to_json(r.mean)}});
  }
  j["details"] = nlohmann::json::array();
  for (const auto& r : result.details) j["details"].push_back(row_json(r));
  return j.dump(2) + "\n";
}

void write_grid_outputs(const GridResult& result, const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  io::write_text(cfg.out_dir / "results.csv", grid_csv(result));
  io::write_text(cfg.out_dir / "results.json", grid_json(result));
  io::write_text(cfg.out_dir / "timing.csv", timing_csv(result.rows));
  io::write_text(cfg.out_dir / "manifest.json", manifest_json(cfg, "grid").dump(2) + "\n");
}

void write_ablation_outputs(const AblationResult& result, const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  io::write_text(cfg.out_dir / "ablation.csv", ablation_csv(result));
  io::write_text(cfg.out_dir / "ablation.json", ablation_json(result));
  io::write_text(cfg.out_dir / "timing.csv", timing_csv(result.details));
  io::write_text(cfg.out_dir / "manifest.json", manifest_json(cfg, "ablate").dump(2) + "\n");
}

}  // namespace spectralift
