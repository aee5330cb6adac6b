#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "palzone/core_model.hpp"

namespace palzone {

// JSON schema, all keys optional (missing keys keep the defaults of ExperimentConfig):
//
//   medium:       rho0, c0, beta, temperature_c, humidity_pct, pressure_kpa, alpha_override (number|null)
//   f_center:     Hz
//   audio_frequencies: [Hz, ...]
//   array:        n_elements, element_width, gap, v0
//   bright, dark: x_min, x_max, z_min, z_max, nx, nz
//   quadrature:   x_min, x_max, z_min, z_max, dx, dz
//   render:       x_min, x_max, z_min, z_max, step
//   optimizer:    n_itr, seed, ridge_scale, multi_start
//   perturbation: snr_db, phase_range_deg, seed, n_trials, snr_grid, phase_grid,
//                 sweep_phase_deg, sweep_snr_db, evaluate_on_clean
//
// An SNR of "inf" (or null) disables amplitude noise. Unknown keys and wrongly
// typed values are reported as ConfigError entries prefixed with their path.

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// Applies a dotted-path override such as "optimizer.n_itr=50" or
/// "audio_frequencies=[1000,8000]". The value is parsed as JSON when possible,
/// otherwise taken as a string.
void apply_override(nlohmann::json& j, std::string_view assignment);

/// Reads a JSON file (or the defaults when `path` is empty), applies the
/// overrides in order and converts. Throws ConfigError on any problem.
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace palzone
