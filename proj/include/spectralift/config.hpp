#pragma once

// JSON configuration with full defaulting, and run manifests.
//
// Every key is optional. Example:
//   {
//     "scene": {"synthetic": "manifold", "height": 64, "width": 64, "bands": 31},
//     "grid": "80-config",            // or a list of {"psf","r","hsi_snr_db","msi_bands","msi_snr_db"}
//     "psfs": ["gaussian", "airy"],   // restricts "80-config" to these families
//     "srf": {"kind": "gaussian", "fwhm_scale": 1.0},
//     "arch": {"hidden_width": 64, "hidden_layers": 6, "activation": "leaky_relu", "skip": true},
//     "train": {"epochs": 500, "batch_size": 1024, "loss": "l1",
//               "schedule": {"kind": "one_cycle", "initial_lr": 1e-4, "max_lr": 1e-3, "final_lr": 1e-6}},
//     "crop": "multiple32", "seed": 0, "workers": 1, "strict": false, "out": "out"
//   }
// SNR values may be numbers or the string "inf" (noise disabled).

#include <filesystem>

#include "json.hpp"
#include "spectralift/pipeline.hpp"

namespace spectralift {

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j);
nlohmann::json arch_to_json(const Architecture& a);
Architecture arch_from_json(const nlohmann::json& j, Architecture defaults = {});
nlohmann::json train_to_json(const TrainConfig& t);
TrainConfig train_from_json(const nlohmann::json& j, TrainConfig defaults = {});

nlohmann::json metrics_to_json(const MetricReport& m);

/// Fully-defaulted config plus seeds, versions and the active SIMD ISA.
/// Contains nothing time-dependent, so strict reruns produce identical bytes.
nlohmann::json manifest_json(const ExperimentConfig& cfg, const std::string& command);

}  // namespace spectralift
