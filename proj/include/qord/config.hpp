#pragma once

// JSON configuration loading. Every loader parses and validates the whole
// file before any work starts; parse errors carry the line number, semantic
// errors name the offending field.

#include <filesystem>
#include <stdexcept>

#include "qord/protocol.hpp"

namespace qord {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace cfg {

struct FisherConfig {
  double visibility = 0.92;
  double bias_phase_rad = pi / 2.0;
  double delta_alpha_min_rad = -pi / 2.0;
  double delta_alpha_max_rad = pi / 2.0;
  int n_points = 201;
};

FisherConfig load_fisher_config(const std::filesystem::path& path);

GridConfig load_grid_config(const std::filesystem::path& path);

/// Single-run config; carries its own sample block and dispersion model.
RunPlan load_run_config(const std::filesystem::path& path);

/// Calibration-sweep config. Settings come either from n_settings/span_rad,
/// or from explicit waveplate angles mapped linearly onto the bias phase.
CalibrationPlan load_calibration_config(const std::filesystem::path& path);

}  // namespace cfg
}  // namespace qord
