// qord: simulate, calibrate, and analyze two-color entangled-pair
// measurements of optical activity. The CLI is a thin shell over the
// library; every number it emits comes from the same functions the tests
// exercise directly.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "qord/config.hpp"
#include "qord/io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPartialFailure = 2;
constexpr int kExitTotalFailure = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_config) {
  auto* config = cmd->add_option("--config", opts.config_path, "JSON config file");
  if (needs_config) config->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "override the config seed")
      ->each([&opts](const std::string&) { opts.seed_given = true; });
  cmd->add_flag("--quiet", opts.quiet, "suppress informational output");
}

fs::path ensure_out_dir(const CommonOptions& opts) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_fisher(const CommonOptions& opts) {
  const auto config = qord::cfg::load_fisher_config(opts.config_path);
  const fs::path dir = ensure_out_dir(opts);

  std::vector<double> grid(config.n_points);
  for (int i = 0; i < config.n_points; ++i) {
    grid[i] = config.delta_alpha_min_rad +
              (config.delta_alpha_max_rad - config.delta_alpha_min_rad) * i /
                  (config.n_points - 1);
  }
  const auto rows = qord::fi_curve(config.visibility, config.bias_phase_rad, grid);
  const auto summary =
      qord::summarize_fi_curve(config.visibility, config.bias_phase_rad,
                               config.delta_alpha_min_rad, config.delta_alpha_max_rad);
  qord::io::write_fi_curve_csv(dir / "fi_curve.csv", rows);
  qord::io::write_fi_summary_json(dir / "fi_summary.json", summary, config.visibility,
                                  config.bias_phase_rad);
  if (!opts.quiet) {
    std::cout << "fi curve: " << rows.size() << " points -> " << (dir / "fi_curve.csv").string()
              << "\n"
              << "max experimental FI " << summary.max_fi_exp << " rad^-2, enhancement ratio "
              << summary.enhancement_ratio << ", break-even visibility "
              << summary.break_even_visibility << "\n";
  }
  return kExitOk;
}

int cmd_grid(const CommonOptions& opts) {
  qord::GridConfig config = qord::cfg::load_grid_config(opts.config_path);
  if (opts.seed_given) config.master_seed = opts.seed;
  const fs::path dir = ensure_out_dir(opts);

  const qord::GridResult result = qord::run_experiment_grid(config);
  qord::io::write_grid_outputs(dir, result);
  std::size_t failed = 0;
  for (const auto& cell : result.cells) {
    if (cell.status != qord::CellStatus::Ok) ++failed;
  }
  if (!opts.quiet) {
    std::cout << "grid: " << result.cells.size() - failed << "/" << result.cells.size()
              << " cells ok -> " << dir.string() << "\n";
    for (const auto& cell : result.cells) {
      if (cell.status != qord::CellStatus::Ok) {
        std::cout << "  failed cell " << qord::scheme_name(cell.scheme) << " c="
                  << cell.concentration_g_per_ml << " dl=" << cell.delta_lambda_nm << ": "
                  << cell.error << "\n";
      }
    }
  }
  if (failed == result.cells.size()) return kExitTotalFailure;
  if (failed > 0) return kExitPartialFailure;
  return kExitOk;
}

int cmd_simulate(const CommonOptions& opts) {
  qord::RunPlan plan = qord::cfg::load_run_config(opts.config_path);
  if (opts.seed_given) plan.rng_seed = opts.seed;
  const fs::path dir = ensure_out_dir(opts);
  const qord::CoincidenceSet set = qord::simulate_run(plan);
  const std::string stem = plan.label.empty() ? set.meta.sample_label : plan.label;
  const fs::path csv = dir / (stem + ".csv");
  qord::io::write_coincidence_csv(csv, set);
  if (!opts.quiet) {
    std::cout << "simulated " << set.bins.size() << " bins, " << set.total_pairs()
              << " pairs -> " << csv.string() << "\n";
  }
  return kExitOk;
}

int cmd_calibrate(const CommonOptions& opts) {
  qord::CalibrationPlan plan = qord::cfg::load_calibration_config(opts.config_path);
  if (opts.seed_given) plan.rng_seed = opts.seed;
  const fs::path dir = ensure_out_dir(opts);
  const auto sweep = qord::simulate_calibration_sweep(plan);
  const qord::CalibrationCurve curve = qord::fit_calibration(sweep);
  qord::io::write_calibration_json(dir / "calibration.json", curve);
  if (!opts.quiet) {
    std::cout << "calibration over " << sweep.size() << " settings: pooled visibility "
              << curve.pooled_visibility << " +- " << curve.se_pooled_visibility << " (chi2/dof "
              << curve.chi2 / std::max(curve.dof, 1) << ") -> "
              << (dir / "calibration.json").string() << "\n";
  }
  return kExitOk;
}

int cmd_estimate(const CommonOptions& opts, const std::string& blank_path,
                 const std::string& sample_path, const std::string& calibration_path,
                 double visibility_flag) {
  const fs::path dir = ensure_out_dir(opts);
  const qord::CoincidenceSet reference = qord::io::read_coincidence_csv(blank_path);
  const qord::CoincidenceSet sample = qord::io::read_coincidence_csv(sample_path);
  double visibility = sample.meta.visibility;
  if (!calibration_path.empty()) {
    visibility = qord::io::read_calibration_visibility(calibration_path);
  } else if (visibility_flag > 0.0) {
    visibility = visibility_flag;
  }
  const qord::Estimate estimate =
      qord::extract_rotation(reference, sample, sample.meta.scheme, visibility);
  qord::io::write_estimates_jsonl(dir / "estimates.jsonl", {estimate});
  if (!opts.quiet) {
    std::cout << qord::parameter_name(estimate.parameter) << " = " << estimate.value_deg
              << " +- " << estimate.std_error_deg << " deg (CRB ratio "
              << estimate.ratio_to_classical_crb << ") -> "
              << (dir / "estimates.jsonl").string() << "\n";
  }
  return kExitOk;
}

int cmd_diagnose(const std::string& counts_path) {
  const qord::CoincidenceSet set = qord::io::read_counts_only_csv(counts_path);
  const auto diags = qord::noise_diagnostics(set);
  static constexpr const char* kNames[4] = {"hh", "hv", "vh", "vv"};
  for (int c = 0; c < 4; ++c) {
    std::cout << kNames[c] << ": mean " << diags[c].mean << ", variance " << diags[c].variance
              << ", Fano " << diags[c].fano << " +- " << diags[c].fano_sigma << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-color entangled-pair optical-activity toolkit"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string blank_path, sample_path, calibration_path, counts_path;
  double visibility_flag = 0.0;

  auto* fisher = app.add_subcommand("fisher", "emit the Fisher-information curve and summary");
  add_common(fisher, opts, true);

  auto* grid = app.add_subcommand("grid", "run the full blank/sample experiment grid");
  add_common(grid, opts, true);

  auto* simulate = app.add_subcommand("simulate", "simulate one coincidence run");
  add_common(simulate, opts, true);

  auto* calibrate = app.add_subcommand("calibrate", "synthesize and fit a calibration sweep");
  add_common(calibrate, opts, true);

  auto* estimate = app.add_subcommand("estimate", "extract a rotation from blank + sample runs");
  add_common(estimate, opts, false);
  estimate->add_option("--blank", blank_path, "blank (water) counts CSV")->required();
  estimate->add_option("--sample", sample_path, "sample counts CSV")->required();
  estimate->add_option("--calibration", calibration_path,
                       "calibration JSON providing the pooled visibility");
  estimate->add_option("--visibility", visibility_flag,
                       "visibility override when no calibration file is given");

  auto* diagnose = app.add_subcommand("diagnose", "per-channel counting-noise diagnostics");
  add_common(diagnose, opts, false);
  diagnose->add_option("--counts", counts_path, "counts CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fisher->parsed()) return cmd_fisher(opts);
    if (grid->parsed()) return cmd_grid(opts);
    if (simulate->parsed()) return cmd_simulate(opts);
    if (calibrate->parsed()) return cmd_calibrate(opts);
    if (estimate->parsed())
      return cmd_estimate(opts, blank_path, sample_path, calibration_path, visibility_flag);
    if (diagnose->parsed()) return cmd_diagnose(counts_path);
  } catch (const qord::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTotalFailure;
  }
  return kExitValidation;
}
