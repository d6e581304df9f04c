// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>

#include "spectralift/config.hpp"
#include "spectralift/io.hpp"
#include "spectralift/pipeline.hpp"
#include "../support.hpp"

using namespace spectralift;
namespace fs = std::filesystem;
namespace oracle = testsupport::oracle;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Frozen thresholds for the manifold-recovery run. Calibrated once on the
// finished pipeline (measured SAM 1.04 deg, PSNR 43.2 dB) with a 20% margin,
// capped by the nominal 5 deg / 30 dB targets.
constexpr double kManifoldSamMaxDeg = 1.25;
constexpr double kManifoldPsnrMinDb = 36.0;

ExperimentConfig manifold_config() {
  ExperimentConfig cfg;
  cfg.scene.synthetic = "manifold";
  cfg.scene.height = 64;
  cfg.scene.width = 64;
  cfg.scene.bands = 31;
  cfg.scene.endmembers = 3;
  cfg.scene.seed = 7;
  cfg.grid = {GridEntry{PsfKind::defaults(PsfFamily::Gaussian), 4, 35.0, 4, 40.0}};
  cfg.crop = CropPolicy::Quarter;
  cfg.train.epochs = 500;
  cfg.train.batch_size = 32;
  cfg.seed = 0;
  return cfg;
}

Outcome metrics_oracle() {
  std::mt19937_64 gen(1001);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const HsiCube x = testsupport::random_cube(gen, 8, 8, 5, 0.05, 1.0);
    const HsiCube y = testsupport::random_cube(gen, 8, 8, 5, 0.05, 1.0);
    const MetricReport r = evaluate(x, y, 4.0);
    for (auto [a, b] : {std::pair{r.rmse, oracle::rmse(x, y)}, {r.psnr_db, oracle::psnr(x, y)},
                        {r.ssim, oracle::ssim(x, y)}, {r.uiqi, oracle::uiqi(x, y)},
                        {r.ergas, oracle::ergas(x, y, 4.0)}, {r.sam_deg, oracle::sam(x, y)}}) {
      worst = std::max(worst, testsupport::rel_err(a, b));
    }
  }
  return {worst < 1e-10, fmt("max relative error %.3g over 100 pairs x 6 metrics", worst)};
}

Outcome linear_ops_oracle() {
  std::mt19937_64 gen(1002);
  std::uniform_int_distribution<std::size_t> dim(3, 9), bands(1, 6), ksize(0, 2);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t h = dim(gen), w = dim(gen), C = bands(gen) + 1, c = bands(gen);
    const HsiCube x = testsupport::random_cube(gen, h, w, C);
    const SrfMatrix r = testsupport::random_srf(gen, C, c);
    const auto pref = oracle::project(x, r);
    const MsiImage m = spectral_project(x, r);
    for (std::size_t i = 0; i < pref.size(); ++i) worst = std::max(worst, std::abs(m.data()[i] - pref[i]));

    const std::size_t k = 2 * std::min(ksize(gen), std::min(h, w) - 1) + 1;
    const PsfKernel psf = testsupport::random_psf(gen, k);
    const auto bref = oracle::blur(x, psf);
    const HsiCube b = blur_per_band(x, psf);
    for (std::size_t i = 0; i < bref.size(); ++i) worst = std::max(worst, std::abs(b.data()[i] - bref[i]));
  }
  return {worst < 1e-6, fmt("max abs error %.3g over 50 projection + 50 blur instances", worst)};
}

double gradient_check(Activation act) {
  Architecture a;
  a.in_bands = 3;
  a.hidden_width = 8;
  a.out_bands = 5;
  a.hidden_layers = 6;
  a.skip = true;
  a.activation = act;
  SinParams p = init_params(a, 1003);
  std::mt19937_64 gen(1003);
  std::uniform_real_distribution<double> u(0.0, 1.0), ub(-0.2, 0.2);
  for (const auto& s : p.layers())
    for (std::size_t j = 0; j < s.out; ++j) p.mutable_values()[s.bias_offset + j] = ub(gen);
  std::vector<double> in(16 * 3), target(16 * 5);
  for (auto& v : in) v = u(gen);
  for (auto& v : target) v = u(gen);
  const SpectraView x{in, 16, 3}, t{target, 16, 5};
  const auto g = loss_and_gradient(p, x, t, LossKind::Mse).grads;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p.values()[i];
    p.mutable_values()[i] = keep + 1e-5;
    const double up = loss(LossKind::Mse, SpectraView{forward(p, x), 16, 5}, t);
    p.mutable_values()[i] = keep - 1e-5;
    const double down = loss(LossKind::Mse, SpectraView{forward(p, x), 16, 5}, t);
    p.mutable_values()[i] = keep;
    worst = std::max(worst, testsupport::rel_err(g[i], (up - down) / 2e-5, 1e-7));
  }
  return worst;
}

Outcome gradients() {
  const double gelu = gradient_check(Activation::Gelu);
  const double leaky = gradient_check(Activation::LeakyRelu);
  return {gelu < 1e-4 && leaky < 1e-4,
          fmt("max relative error: gelu %.3g", gelu) + fmt(", leaky relu %.3g (6-layer skip net, 16 pixels)", leaky)};
}

Outcome identity_recovery() {
  const HsiCube gt = make_manifold_scene(32, 32, 8, 3, 1004);
  DegradationSpec spec;
  spec.psf = PsfKind::defaults(PsfFamily::Delta);
  spec.r = 1;
  spec.hsi_snr_db = kNoNoise;
  spec.msi_snr_db = kNoNoise;
  spec.srf = SrfMatrix::identity(8);
  const DegradedPair pair = wald_degrade(gt, spec);
  TrainConfig cfg;
  cfg.epochs = 200;
  // 1024 pixels only: small batches give enough steps in 200 epochs
  cfg.batch_size = 8;
  cfg.schedule = OneCycle{3e-4, 3e-3, 1e-6};
  cfg.seed = 1004;
  const TrainResult r = train(pair.lr_hsi, spec.srf, Architecture{}, cfg);
  const double l1 = evaluate_training_loss(r.params, pair.lr_hsi, spec.srf, LossKind::L1);
  return {l1 < 1e-3, fmt("mean per-pixel l1 %.3g after 200 epochs", l1)};
}

Outcome manifold_recovery() {
  const ExperimentConfig cfg = manifold_config();
  const GridResult r = run_grid(cfg);
  const GridRow& row = r.rows.at(0);
  if (!row.ok) return {false, "run failed: " + row.error};
  const bool pass = row.metrics.sam_deg < kManifoldSamMaxDeg && row.metrics.psnr_db > kManifoldPsnrMinDb;
  return {pass, fmt("SAM %.3f deg", row.metrics.sam_deg) + fmt(" (< %.2f)", kManifoldSamMaxDeg) +
                    fmt(", PSNR %.2f dB", row.metrics.psnr_db) + fmt(" (> %.1f)", kManifoldPsnrMinDb) +
                    fmt(", SSIM %.4f on the right-edge quarter", row.metrics.ssim)};
}

Outcome parameter_counts() {
  const auto plan = plan_ablation(ExperimentConfig{}, 191);
  auto find = [&](const std::string& name) {
    for (const auto& r : plan)
      if (r.variant == name) return r.mean_parameters / 1e6;
    return -1.0;
  };
  const double base = find("baseline"), lin = find("linear_map"), w32 = find("width_32");
  auto rounds_to = [](double m, double want) { return std::abs(std::round(m * 1e4) / 1e4 - want) < 1e-9; };
  const bool pass = rounds_to(base, 0.0336) && rounds_to(lin, 0.0012) && rounds_to(w32, 0.0118);
  return {pass, fmt("baseline %.4f M", base) + fmt(", linear map %.4f M", lin) + fmt(", width 32 %.4f M", w32) +
                    " (c=4, C=191, mean over the grid's MSI band counts)"};
}

Outcome tiling() {
  Architecture a;
  a.in_bands = 4;
  a.out_bands = 31;
  const SinParams p = init_params(a, 1007);
  std::mt19937_64 gen(1007);
  const MsiImage msi = retag<MsiTag>(testsupport::random_cube(gen, 128, 128, 4));
  const HsiCube whole = infer(p, msi);
  const bool four = infer_tiled(p, msi, 2, 2) == whole;
  const bool sixteen = infer_tiled(p, msi, 4, 4) == whole;
  return {four && sixteen, std::string("4 tiles ") + (four ? "identical" : "DIFFER") + ", 16 tiles " +
                               (sixteen ? "identical" : "DIFFER")};
}

Outcome determinism() {
  ExperimentConfig cfg = manifold_config();
  cfg.grid = {GridEntry{PsfKind::defaults(PsfFamily::Gaussian), 4, 35.0, 4, 40.0},
              GridEntry{PsfKind::defaults(PsfFamily::Airy), 4, 35.0, 4, 40.0}};
  cfg.strict = true;
  cfg.workers = 2;
  const fs::path root = fs::temp_directory_path() / "spectralift_acceptance_determinism";
  fs::remove_all(root);
  for (const char* run : {"a", "b"}) {
    ExperimentConfig c = cfg;
    c.out_dir = root / run;
    write_grid_outputs(run_grid(c), c);
  }
  std::string detail;
  bool pass = true;
  for (const char* f : {"results.csv", "results.json", "manifest.json"}) {
    const bool same = io::read_text(root / "a" / f) == io::read_text(root / "b" / f);
    pass = pass && same;
    detail += std::string(detail.empty() ? "" : ", ") + f + (same ? " identical" : " DIFFER");
  }
  return {pass, detail};
}

Outcome schedules() {
  double worst = 0.0;
  const OneCycle oc;
  for (std::size_t total : {10u, 97u, 1000u, 12345u}) {
    const std::size_t peak = one_cycle_peak_step(oc, total);
    worst = std::max(worst, std::abs(lr_at(oc, peak, total) - oc.max_lr));
    worst = std::max(worst, std::abs(lr_at(oc, total - 1, total) - oc.final_lr));
    double hi = 0.0;
    for (std::size_t s = 0; s < total; ++s) hi = std::max(hi, lr_at(oc, s, total));
    worst = std::max(worst, std::abs(hi - oc.max_lr));
  }
  const CosineRestarts cr;
  std::size_t start = 0, len = cr.first_cycle;
  for (int c = 0; c < 6; ++c) {
    worst = std::max(worst, std::abs(lr_at(cr, start, 0) - cr.max_lr));
    worst = std::max(worst, std::abs(lr_at(cr, start + len, 0) - cr.min_lr));
    start += len + 1;
    len = static_cast<std::size_t>(std::llround(static_cast<double>(len) * cr.multiplier));
  }
  return {worst <= 1e-12, fmt("max deviation %.3g at peaks, ends, restarts and cycle ends", worst)};
}

// Benchmark-scale run, only when a real scene is supplied.
Outcome benchmark_scene(bool& skipped) {
  const char* payload = std::getenv("SPECTRALIFT_DC_PAYLOAD");
  const char* sidecar = std::getenv("SPECTRALIFT_DC_SIDECAR");
  if (payload == nullptr || sidecar == nullptr) {
    skipped = true;
    return {true, "not run: set SPECTRALIFT_DC_PAYLOAD and SPECTRALIFT_DC_SIDECAR to a raw cube + sidecar"};
  }
  ExperimentConfig cfg;
  cfg.scene.path = payload;
  cfg.scene.sidecar = sidecar;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  const GridResult r = run_grid(cfg);
  skipped = true;
  return {true, fmt("reported only: mean PSNR %.2f dB", r.mean.psnr_db) + fmt(", SAM %.2f deg", r.mean.sam_deg) +
                    " (reference 35.96 dB / 3.22 deg)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "metric oracle equivalence", 5.0, metrics_oracle},
      {2, "linear operator oracle equivalence", 5.0, linear_ops_oracle},
      {3, "gradient correctness", 10.0, gradients},
      {4, "identity recovery", 60.0, identity_recovery},
      {5, "manifold recovery", 300.0, manifold_recovery},
      {6, "parameter-count reproduction", 0.0, parameter_counts},
      {7, "tiling invariance", 0.0, tiling},
      {8, "determinism under --strict", 0.0, determinism},
      {9, "schedule correctness", 0.0, schedules},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass;
    std::string timing = fmt("%.2fs", secs);
    if (c.limit_s > 0.0) {
      timing += fmt(" (limit %.0fs)", c.limit_s);
      if (secs >= c.limit_s) pass = false;
    }
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s -- %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  bool skipped = false;
  Outcome bench;
  try {
    bench = benchmark_scene(skipped);
  } catch (const std::exception& e) {
    bench = {true, std::string("reported only, run failed: ") + e.what()};
  }
  std::printf("%s criterion 10: benchmark-scene grid (documented, not asserted) -- %s\n", skipped ? "SKIP" : "PASS",
              bench.detail.c_str());
  std::printf("%d of %zu asserted criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
