#pragma once

// File formats: coincidence CSVs with JSON metadata sidecars, estimate
// records as JSON lines, FI-curve and grid-result CSV tables, calibration
// JSON, and the grid output bundle with its manifest. All numeric output is
// round-trip exact and byte-deterministic for fixed inputs.

#include <filesystem>
#include <string>
#include <vector>

#include "qord/estimation.hpp"
#include "qord/info_metrics.hpp"
#include "qord/protocol.hpp"

namespace qord::io {

inline constexpr const char* kCountsCsvHeader = "bin_index,n_hh,n_hv,n_vh,n_vv";
inline constexpr const char* kFiCurveCsvHeader =
    "delta_alpha_rad,fi_exp,fi_quantum_ideal,fi_classical_ideal";
inline constexpr const char* kGridTableCsvHeader =
    "scheme,concentration_g_per_ml,delta_lambda_nm,parameter,estimate_deg,std_error_deg,"
    "prediction_deg,ratio_to_classical_crb";

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

/// Sidecar path for a counts CSV: "<stem>.meta.json" next to the file.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Writes the counts CSV plus its metadata sidecar.
void write_coincidence_csv(const std::filesystem::path& csv_path, const CoincidenceSet& set);

/// Reads a counts CSV together with its required metadata sidecar.
CoincidenceSet read_coincidence_csv(const std::filesystem::path& csv_path);

/// Reads a counts CSV alone; metadata keeps defaults. For diagnostics that
/// need only the raw bins.
CoincidenceSet read_counts_only_csv(const std::filesystem::path& csv_path);

/// One JSON object per line, carrying every field of the estimate record.
void write_estimates_jsonl(const std::filesystem::path& path,
                           const std::vector<Estimate>& estimates);

void write_fi_curve_csv(const std::filesystem::path& path, const std::vector<FiCurveRow>& rows);

void write_fi_summary_json(const std::filesystem::path& path, const FiCurveSummary& summary,
                           double visibility, double bias_phase_rad);

void write_calibration_json(const std::filesystem::path& path, const CalibrationCurve& curve);

/// Pooled visibility stored by write_calibration_json.
double read_calibration_visibility(const std::filesystem::path& path);

/// Writes the whole grid bundle into out_dir: per-cell counts CSVs under
/// cells/, estimates.jsonl, grid_table.csv, and manifest.json.
void write_grid_outputs(const std::filesystem::path& out_dir, const GridResult& result);

}  // namespace qord::io
