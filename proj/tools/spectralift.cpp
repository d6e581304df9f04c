#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "spectralift/config.hpp"
#include "spectralift/error.hpp"
#include "spectralift/io.hpp"
#include "spectralift/pipeline.hpp"
#include "spectralift/rng.hpp"
#include "spectralift/simd/kernels.hpp"

namespace sl = spectralift;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool strict = false;
  std::string out;
  std::string simd;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config (every key optional)");
  cmd->add_option("--seed", c.seed, "Experiment seed");
  cmd->add_option("--workers", c.workers, "Concurrent grid configurations");
  cmd->add_flag("--strict", c.strict, "Fixed-order reductions for bit-for-bit reproducibility");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--simd", c.simd, "Kernel ISA: scalar or avx2 (default: best available)");
}

sl::ExperimentConfig resolve(const Common& c) {
  if (!c.simd.empty()) sl::simd::set_active_isa(sl::simd::parse_isa(c.simd));
  sl::ExperimentConfig cfg = c.config.empty() ? sl::ExperimentConfig{} : sl::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  if (c.strict) cfg.strict = true;
  if (!c.out.empty()) cfg.out_dir = c.out;
  cfg.train.strict = cfg.train.strict || cfg.strict;
  return cfg;
}

void write_manifest(const sl::ExperimentConfig& cfg, const std::string& command, const json& inputs = {}) {
  json m = sl::manifest_json(cfg, command);
  if (!inputs.is_null()) m["inputs"] = inputs;
  fs::create_directories(cfg.out_dir);
  sl::io::write_text(cfg.out_dir / "manifest.json", m.dump(2) + "\n");
}

void print_metrics(const sl::MetricReport& m) {
  std::printf("rmse=%s psnr_db=%s ssim=%s uiqi=%s ergas=%s sam_deg=%s\n", sl::format_metric(m.rmse).c_str(),
              sl::format_metric(m.psnr_db).c_str(), sl::format_metric(m.ssim).c_str(),
              sl::format_metric(m.uiqi).c_str(), sl::format_metric(m.ergas).c_str(),
              sl::format_metric(m.sam_deg).c_str());
}

std::string json_num(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v.get<double>());
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral inversion network for hyperspectral/multispectral fusion"};
  app.set_version_flag("--version", SPECTRALIFT_VERSION);
  app.require_subcommand(1);

  // degrade
  Common dc;
  std::size_t entry_index = 0;
  std::optional<std::string> d_psf;
  std::optional<std::size_t> d_r, d_bands;
  auto* degrade = app.add_subcommand("degrade", "Simulate an LR-HSI / HR-MSI pair from the configured scene");
  add_common(degrade, dc);
  degrade->add_option("--entry", entry_index, "Index of the grid entry to use");
  degrade->add_option("--psf", d_psf, "Override the PSF family");
  degrade->add_option("--r", d_r, "Override the downsampling factor (HSI SNR follows the grid pairing)");
  degrade->add_option("--msi-bands", d_bands, "Override the MSI band count");

  // train
  Common tc;
  std::string t_lr, t_srf;
  std::optional<std::size_t> t_epochs;
  auto* train = app.add_subcommand("train", "Fit the network on an LR-HSI and SRF");
  add_common(train, tc);
  train->add_option("--lr-hsi", t_lr, "LR-HSI cube (.slc)")->required();
  train->add_option("--srf", t_srf, "SRF CSV (C rows x c columns)")->required();
  train->add_option("--epochs", t_epochs, "Override the epoch count");

  // infer
  Common ic;
  std::string i_params, i_msi;
  auto* inferc = app.add_subcommand("infer", "Reconstruct an HR-HSI from an HR-MSI");
  add_common(inferc, ic);
  inferc->add_option("--params", i_params, "Trained parameters (.slp)")->required();
  inferc->add_option("--msi", i_msi, "HR-MSI cube (.slc)")->required();

  // evaluate
  Common ec;
  std::string e_gt, e_est, e_crop = "multiple32";
  double e_r = 4.0;
  bool e_sliding = false;
  auto* evaluatec = app.add_subcommand("evaluate", "Score a reconstruction against ground truth");
  add_common(evaluatec, ec);
  evaluatec->add_option("--gt", e_gt, "Ground-truth cube (.slc)")->required();
  evaluatec->add_option("--estimate", e_est, "Reconstructed cube (.slc)")->required();
  evaluatec->add_option("--r", e_r, "Resolution ratio used by ERGAS");
  evaluatec->add_option("--crop", e_crop, "Test crop: multiple32, quarter or none");
  evaluatec->add_flag("--sliding-ssim", e_sliding, "Use 7x7 sliding-window SSIM instead of global statistics");

  // grid
  Common gc;
  auto* grid = app.add_subcommand("grid", "Run the degradation grid");
  add_common(grid, gc);

  // ablate
  Common ac;
  bool a_plan = false;
  std::size_t a_bands = 0;
  auto* ablate = app.add_subcommand("ablate", "Run the architecture/training ablation on the Gaussian-PSF subset");
  add_common(ablate, ac);
  ablate->add_flag("--plan-only", a_plan, "Only report parameter counts");
  ablate->add_option("--bands", a_bands, "HSI band count for --plan-only (default: the scene's)");

  // report
  std::string r_dir;
  auto* report = app.add_subcommand("report", "Summarize results written by grid or ablate");
  report->add_option("dir", r_dir, "Output directory of a previous run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (degrade->parsed()) {
      auto cfg = resolve(dc);
      if (cfg.grid.empty()) throw sl::ParameterError("the configured grid is empty");
      if (entry_index >= cfg.grid.size()) throw sl::ParameterError("--entry out of range");
      sl::GridEntry e = cfg.grid[entry_index];
      if (d_psf) e.psf = sl::PsfKind::defaults(sl::parse_psf(*d_psf));
      if (d_r) {
        e.r = *d_r;
        e.hsi_snr_db = sl::paired_hsi_snr_db(e.r);
      }
      if (d_bands) e.msi_bands = *d_bands;
      const sl::HsiCube gt = sl::load_scene(cfg.scene, cfg.normalize);
      sl::DegradationSpec spec;
      spec.psf = e.psf;
      spec.r = e.r;
      spec.hsi_snr_db = e.hsi_snr_db;
      spec.srf = sl::build_srf(cfg.srf, gt.bands(), e.msi_bands);
      spec.msi_snr_db = e.msi_snr_db;
      spec.seed = sl::rng::derive_seed(cfg.seed, "degrade");
      spec.psf_size = cfg.psf_size;
      const auto pair = sl::wald_degrade(gt, spec);
      fs::create_directories(cfg.out_dir);
      sl::io::save_cube(gt, cfg.out_dir / "gt.slc");
      sl::io::save_cube(pair.lr_hsi, cfg.out_dir / "lr_hsi.slc");
      sl::io::save_cube(pair.hr_msi, cfg.out_dir / "hr_msi.slc");
      sl::io::write_srf_csv(spec.srf, cfg.out_dir / "srf.csv");
      write_manifest(cfg, "degrade",
                     {{"psf", sl::psf_name(e.psf.family)}, {"r", e.r}, {"msi_bands", spec.srf.cols()}});
      std::printf("wrote %s/{gt,lr_hsi,hr_msi}.slc and srf.csv\n", cfg.out_dir.string().c_str());
    } else if (train->parsed()) {
      auto cfg = resolve(tc);
      if (t_epochs) cfg.train.epochs = *t_epochs;
      if (tc.seed) cfg.train.seed = *tc.seed;
      const auto lr = sl::io::load_cube<sl::HsiTag>(t_lr);
      const auto srf = sl::io::read_srf_csv(t_srf);
      const auto result = sl::train(lr, srf, cfg.arch, cfg.train);
      fs::create_directories(cfg.out_dir);
      sl::io::save_params(result.params, cfg.out_dir / "params.slp");
      sl::io::write_text(cfg.out_dir / "train_log.csv", sl::training_log_csv(result.log));
      write_manifest(cfg, "train", {{"lr_hsi", t_lr}, {"srf", t_srf}});
      std::printf("final mean loss %.6g after %zu epochs, %zu parameters\n",
                  result.log.empty() ? 0.0 : result.log.back().mean_loss, result.log.size(),
                  result.params.arch().parameter_count());
    } else if (inferc->parsed()) {
      auto cfg = resolve(ic);
      const auto params = sl::io::load_params(i_params);
      const auto msi = sl::io::load_cube<sl::MsiTag>(i_msi);
      const auto est = sl::infer(params, msi, sl::InferOptions{4096, cfg.workers});
      fs::create_directories(cfg.out_dir);
      sl::io::save_cube(est, cfg.out_dir / "estimate.slc", sl::io::SaveOptions{true});
      write_manifest(cfg, "infer", {{"params", i_params}, {"msi", i_msi}});
      std::printf("wrote %s\n", (cfg.out_dir / "estimate.slc").string().c_str());
    } else if (evaluatec->parsed()) {
      auto cfg = resolve(ec);
      auto gt = sl::io::load_cube<sl::HsiTag>(e_gt);
      auto est = sl::io::load_cube<sl::HsiTag>(e_est);
      if (gt.shape() != est.shape()) throw sl::DimensionError("ground truth and estimate shapes differ");
      json region = nullptr;
      if (e_crop != "none") {
        const auto split = sl::crop_split(gt.shape(), sl::parse_crop_policy(e_crop));
        gt = sl::crop(gt, split.test);
        est = sl::crop(est, split.test);
        region = {{"row", split.test.row}, {"col", split.test.col}, {"height", split.test.height},
                  {"width", split.test.width}};
      }
      sl::SsimOptions so;
      if (e_sliding) so.window = sl::SsimWindow::Sliding;
      const auto m = sl::evaluate(gt, est, e_r, 1.0, so);
      fs::create_directories(cfg.out_dir);
      json j = sl::metrics_to_json(m);
      j["test_region"] = region;
      sl::io::write_text(cfg.out_dir / "metrics.json", j.dump(2) + "\n");
      sl::io::write_text(cfg.out_dir / "metrics.csv",
                         "rmse,psnr_db,ssim,uiqi,ergas,sam_deg\n" + sl::report_csv_row(m) + "\n");
      write_manifest(cfg, "evaluate", {{"gt", e_gt}, {"estimate", e_est}, {"crop", e_crop}});
      print_metrics(m);
    } else if (grid->parsed()) {
      auto cfg = resolve(gc);
      const auto result = sl::run_grid(cfg);
      sl::write_grid_outputs(result, cfg);
      for (const auto& r : result.rows) {
        if (!r.ok) std::fprintf(stderr, "config %zu failed: %s\n", r.config_id, r.error.c_str());
      }
      std::printf("%zu/%zu configurations succeeded; mean: ", result.succeeded, result.rows.size());
      print_metrics(result.mean);
      return result.succeeded == result.rows.size() ? 0 : 1;
    } else if (ablate->parsed()) {
      auto cfg = resolve(ac);
      if (a_plan) {
        const std::size_t bands = a_bands ? a_bands : sl::load_scene(cfg.scene, cfg.normalize).bands();
        std::printf("%-14s %10s %12s\n", "variant", "params_m", "parameters");
        for (const auto& r : sl::plan_ablation(cfg, bands)) {
          std::printf("%-14s %10.4f %12.1f\n", r.variant.c_str(), r.mean_parameters / 1e6, r.mean_parameters);
        }
        return 0;
      }
      const auto result = sl::run_ablation(cfg);
      sl::write_ablation_outputs(result, cfg);
      std::printf("%-14s %10s %10s %10s %10s\n", "variant", "params_m", "psnr_db", "ssim", "sam_deg");
      for (const auto& r : result.rows) {
        std::printf("%-14s %10.4f %10.3f %10.4f %10.3f\n", r.variant.c_str(), r.mean_parameters / 1e6,
                    r.mean.psnr_db, r.mean.ssim, r.mean.sam_deg);
      }
    } else if (report->parsed()) {
      const fs::path dir = r_dir;
      if (fs::exists(dir / "results.json")) {
        const json j = json::parse(sl::io::read_text(dir / "results.json"));
        std::printf("%4s %-20s %3s %3s %9s %9s %8s\n", "id", "psf", "r", "b", "psnr_db", "sam_deg", "ssim");
        for (const auto& row : j.at("rows")) {
          if (!row.at("ok").get<bool>()) {
            std::printf("%4zu %-20s failed: %s\n", row.at("config_id").get<std::size_t>(),
                        row.at("psf").get<std::string>().c_str(), row.at("error").get<std::string>().c_str());
            continue;
          }
          const auto& m = row.at("metrics");
          std::printf("%4zu %-20s %3zu %3zu %9s %9s %8s\n", row.at("config_id").get<std::size_t>(),
                      row.at("psf").get<std::string>().c_str(), row.at("r").get<std::size_t>(),
                      row.at("msi_bands").get<std::size_t>(), json_num(m.at("psnr_db")).c_str(),
                      json_num(m.at("sam_deg")).c_str(), json_num(m.at("ssim")).c_str());
        }
        const auto& m = j.at("mean");
        std::printf("mean over %zu/%zu: psnr_db=%s sam_deg=%s ssim=%s\n", j.at("succeeded").get<std::size_t>(),
                    j.at("configs").get<std::size_t>(), json_num(m.at("psnr_db")).c_str(),
                    json_num(m.at("sam_deg")).c_str(), json_num(m.at("ssim")).c_str());
      } else if (fs::exists(dir / "ablation.json")) {
        const json j = json::parse(sl::io::read_text(dir / "ablation.json"));
        std::printf("%-14s %10s %9s %9s %8s\n", "variant", "params_m", "psnr_db", "sam_deg", "ssim");
        for (const auto& v : j.at("variants")) {
          const auto& m = v.at("mean");
          std::printf("%-14s %10s %9s %9s %8s\n", v.at("variant").get<std::string>().c_str(),
                      v.at("params_m").get<std::string>().c_str(), json_num(m.at("psnr_db")).c_str(),
                      json_num(m.at("sam_deg")).c_str(), json_num(m.at("ssim")).c_str());
        }
      } else {
        throw sl::ParameterError("no results.json or ablation.json in " + dir.string());
      }
    }
  } catch (const sl::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
