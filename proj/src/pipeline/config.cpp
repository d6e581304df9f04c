#include "spectralift/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spectralift/error.hpp"
#include "spectralift/io.hpp"
#include "spectralift/simd/kernels.hpp"

namespace spectralift {
namespace {

using nlohmann::json;

double snr_from_json(const json& j, double fallback) {
  if (j.is_null()) return fallback;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "none") return kNoNoise;
    throw ParameterError("SNR must be a number or \"inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

json snr_to_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

json get_or_null(const json& j, const char* key) { return j.contains(key) ? j.at(key) : json(); }

PsfKind psf_from_json(const json& j) {
  if (j.is_string()) return PsfKind::defaults(parse_psf(j.get<std::string>()));
  PsfKind k = PsfKind::defaults(parse_psf(j.at("family").get<std::string>()));
  k.width = j.value("width", k.width);
  k.shape = j.value("shape", k.shape);
  return k;
}

json psf_to_json(const PsfKind& k) {
  return {{"family", psf_name(k.family)}, {"width", k.width}, {"shape", k.shape}};
}

GridEntry entry_from_json(const json& j) {
  GridEntry e;
  if (j.contains("psf")) e.psf = psf_from_json(j.at("psf"));
  e.r = j.value("r", e.r);
  e.hsi_snr_db = snr_from_json(get_or_null(j, "hsi_snr_db"), e.hsi_snr_db);
  e.msi_bands = j.value("msi_bands", e.msi_bands);
  e.msi_snr_db = snr_from_json(get_or_null(j, "msi_snr_db"), e.msi_snr_db);
  return e;
}

json entry_to_json(const GridEntry& e) {
  return {{"psf", psf_to_json(e.psf)},
          {"r", e.r},
          {"hsi_snr_db", snr_to_json(e.hsi_snr_db)},
          {"msi_bands", e.msi_bands},
          {"msi_snr_db", snr_to_json(e.msi_snr_db)}};
}

std::string_view srf_kind_name(SrfSourceKind k) {
  switch (k) {
    case SrfSourceKind::Gaussian:
      return "gaussian";
    case SrfSourceKind::File:
      return "file";
    case SrfSourceKind::Identity:
      return "identity";
  }
  return "gaussian";
}

SrfSourceKind parse_srf_kind(const std::string& s) {
  if (s == "gaussian") return SrfSourceKind::Gaussian;
  if (s == "file") return SrfSourceKind::File;
  if (s == "identity") return SrfSourceKind::Identity;
  throw ParameterError("unknown SRF kind '" + s + "'");
}

}  // namespace

json schedule_to_json(const Schedule& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, OneCycle>) {
          return {{"kind", "one_cycle"},         {"initial_lr", v.initial_lr}, {"max_lr", v.max_lr},
                  {"final_lr", v.final_lr},      {"total_steps", v.total_steps},
                  {"peak_fraction", v.peak_fraction}};
        } else if constexpr (std::is_same_v<T, CosineRestarts>) {
          return {{"kind", "cosine_restarts"},
                  {"max_lr", v.max_lr},
                  {"min_lr", v.min_lr},
                  {"first_cycle", v.first_cycle},
                  {"multiplier", v.multiplier}};
        } else {
          return {{"kind", "constant"}, {"lr", v.lr}};
        }
      },
      s);
}

Schedule schedule_from_json(const json& j) {
  const std::string kind = j.value("kind", "one_cycle");
  if (kind == "one_cycle") {
    OneCycle s;
    s.initial_lr = j.value("initial_lr", s.initial_lr);
    s.max_lr = j.value("max_lr", s.max_lr);
    s.final_lr = j.value("final_lr", s.final_lr);
    s.total_steps = j.value("total_steps", s.total_steps);
    s.peak_fraction = j.value("peak_fraction", s.peak_fraction);
    return s;
  }
  if (kind == "cosine_restarts") {
    CosineRestarts s;
    s.max_lr = j.value("max_lr", s.max_lr);
    s.min_lr = j.value("min_lr", s.min_lr);
    s.first_cycle = j.value("first_cycle", s.first_cycle);
    s.multiplier = j.value("multiplier", s.multiplier);
    return s;
  }
  if (kind == "constant") return ConstantLr{j.value("lr", ConstantLr{}.lr)};
  throw ParameterError("unknown schedule kind '" + kind + "'");
}

json arch_to_json(const Architecture& a) {
  return {{"hidden_width", a.hidden_width}, {"hidden_layers", a.hidden_layers},
          {"activation", activation_name(a.activation)}, {"skip", a.skip},
          {"leaky_slope", a.leaky_slope}};
}

Architecture arch_from_json(const json& j, Architecture a) {
  a.hidden_width = j.value("hidden_width", a.hidden_width);
  a.hidden_layers = j.value("hidden_layers", a.hidden_layers);
  if (j.contains("activation")) a.activation = parse_activation(j.at("activation").get<std::string>());
  a.skip = j.value("skip", a.skip);
  a.leaky_slope = j.value("leaky_slope", a.leaky_slope);
  return a;
}

json train_to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"loss", loss_name(t.loss)},
          {"l1_reduction", t.loss_options.l1_reduction == L1Reduction::SumBands ? "sum_bands" : "mean_bands"},
          {"schedule", schedule_to_json(t.schedule)},
          {"seed", t.seed},
          {"early_stop_patience", t.early_stop_patience},
          {"threads", t.threads}};
}

TrainConfig train_from_json(const json& j, TrainConfig t) {
  t.epochs = j.value("epochs", t.epochs);
  t.batch_size = j.value("batch_size", t.batch_size);
  if (j.contains("loss")) t.loss = parse_loss(j.at("loss").get<std::string>());
  if (j.contains("l1_reduction")) {
    const auto r = j.at("l1_reduction").get<std::string>();
    if (r == "sum_bands") t.loss_options.l1_reduction = L1Reduction::SumBands;
    else if (r == "mean_bands") t.loss_options.l1_reduction = L1Reduction::MeanBands;
    else throw ParameterError("unknown l1_reduction '" + r + "'");
  }
  if (j.contains("schedule")) t.schedule = schedule_from_json(j.at("schedule"));
  t.seed = j.value("seed", t.seed);
  t.early_stop_patience = j.value("early_stop_patience", t.early_stop_patience);
  t.threads = j.value("threads", t.threads);
  return t;
}

json metrics_to_json(const MetricReport& m) {
  auto num = [](double v) -> json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
  };
  return {{"rmse", num(m.rmse)},         {"psnr_db", num(m.psnr_db)},
          {"ssim", num(m.ssim)},         {"uiqi", num(m.uiqi)},
          {"ergas", num(m.ergas)},       {"sam_deg", num(m.sam_deg)},
          {"r_ratio", m.r_ratio},        {"max_value", m.max_value},
          {"ssim_c1", m.ssim_c1},        {"ssim_c2", m.ssim_c2},
          {"sam_eps", m.sam_eps},        {"sam_delta", m.sam_delta},
          {"uiqi_skipped_bands", m.uiqi_skipped_bands},
          {"ergas_skipped_bands", m.ergas_skipped_bands}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    if (s.is_string()) {
      cfg.scene.path = s.get<std::string>();
    } else {
      cfg.scene.path = s.value("path", std::string());
      cfg.scene.sidecar = s.value("sidecar", std::string());
      cfg.scene.synthetic = s.value("synthetic", std::string());
      cfg.scene.height = s.value("height", cfg.scene.height);
      cfg.scene.width = s.value("width", cfg.scene.width);
      cfg.scene.bands = s.value("bands", cfg.scene.bands);
      cfg.scene.endmembers = s.value("endmembers", cfg.scene.endmembers);
      cfg.scene.seed = s.value("seed", cfg.scene.seed);
      cfg.scene.name = s.value("name", cfg.scene.name);
    }
  }
  cfg.normalize = j.value("normalize", cfg.normalize);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (g.is_string()) {
      if (g.get<std::string>() != "80-config") throw ParameterError("unknown named grid '" + g.get<std::string>() + "'");
      cfg.grid = standard_grid();
    } else {
      cfg.grid.clear();
      for (const json& e : g) cfg.grid.push_back(entry_from_json(e));
    }
  }
  if (j.contains("psfs")) {
    std::vector<PsfFamily> families;
    for (const json& p : j.at("psfs")) families.push_back(parse_psf(p.get<std::string>()));
    std::vector<GridEntry> kept;
    for (const GridEntry& e : cfg.grid) {
      if (std::find(families.begin(), families.end(), e.psf.family) != families.end()) kept.push_back(e);
    }
    cfg.grid = std::move(kept);
  }
  if (j.contains("srf")) {
    const json& s = j.at("srf");
    if (s.is_string()) {
      cfg.srf.kind = SrfSourceKind::File;
      cfg.srf.path = s.get<std::string>();
    } else {
      cfg.srf.kind = parse_srf_kind(s.value("kind", std::string("gaussian")));
      cfg.srf.fwhm_scale = s.value("fwhm_scale", cfg.srf.fwhm_scale);
      cfg.srf.path = s.value("path", std::string());
    }
  }
  if (j.contains("arch")) cfg.arch = arch_from_json(j.at("arch"), cfg.arch);
  if (j.contains("train")) cfg.train = train_from_json(j.at("train"), cfg.train);
  if (j.contains("crop")) cfg.crop = parse_crop_policy(j.at("crop").get<std::string>());
  cfg.psf_size = j.value("psf_size", cfg.psf_size);
  cfg.out_dir = j.value("out", cfg.out_dir.string());
  cfg.seed = j.value("seed", cfg.seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.strict = j.value("strict", cfg.strict);
  cfg.save_outputs = j.value("save_outputs", cfg.save_outputs);
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json grid = json::array();
  for (const GridEntry& e : cfg.grid) grid.push_back(entry_to_json(e));
  return {{"scene",
           {{"path", cfg.scene.path.string()},
            {"sidecar", cfg.scene.sidecar.string()},
            {"synthetic", cfg.scene.synthetic},
            {"height", cfg.scene.height},
            {"width", cfg.scene.width},
            {"bands", cfg.scene.bands},
            {"endmembers", cfg.scene.endmembers},
            {"seed", cfg.scene.seed},
            {"name", cfg.scene.name}}},
          {"normalize", cfg.normalize},
          {"grid", grid},
          {"srf", {{"kind", srf_kind_name(cfg.srf.kind)}, {"fwhm_scale", cfg.srf.fwhm_scale}, {"path", cfg.srf.path.string()}}},
          {"arch", arch_to_json(cfg.arch)},
          {"train", train_to_json(cfg.train)},
          {"crop", crop_policy_name(cfg.crop)},
          {"psf_size", cfg.psf_size},
          {"out", cfg.out_dir.string()},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"strict", cfg.strict},
          {"save_outputs", cfg.save_outputs}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  try {
    return config_from_json(json::parse(io::read_text(path)));
  } catch (const json::exception& e) {
    throw ParameterError("config '" + path.string() + "': " + e.what());
  }
}

json manifest_json(const ExperimentConfig& cfg, const std::string& command) {
  json m;
  m["command"] = command;
  m["config"] = config_to_json(cfg);
  // Neither the pool size nor the output location influences results; leaving
  // them out lets reruns into different directories compare byte-for-byte.
  m["config"].erase("workers");
  m["config"].erase("out");
  m["seeds"] = {{"experiment", cfg.seed}, {"scene", cfg.scene.seed}, {"train", cfg.train.seed}};
  m["versions"] = {{"spectralift", SPECTRALIFT_VERSION},
                   {"compiler", __VERSION__},
                   {"cxx_standard", __cplusplus},
                   {"simd_isa", simd::isa_name(simd::kernels().isa)}};
  return m;
}

}  // namespace spectralift
