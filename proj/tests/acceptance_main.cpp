// Acceptance suite: one check per headline property of the toolkit, each
// printed as a single [PASS]/[FAIL] line. The process exit code is the
// number of failed checks. Statistical checks run on fixed seeds so the
// suite is deterministic.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qord/config.hpp"
#include "qord/io.hpp"

using namespace qord;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << name;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << "\n";
  if (!pass) ++g_failures;
}

double elapsed_s(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path scratch_dir() {
  const fs::path dir =
      fs::temp_directory_path() / ("qord_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string fmt(double v) {
  std::ostringstream oss;
  oss.precision(6);
  oss << v;
  return oss.str();
}

GridConfig load_default_grid() {
  return cfg::load_grid_config(fs::path(QORD_CONFIG_DIR) / "grid_default.json");
}

RunPlan grid_run_plan(const GridConfig& config, Scheme scheme, double concentration,
                      double delta_lambda, std::uint64_t seed) {
  RunPlan plan;
  plan.scheme = scheme;
  plan.sample.is_blank = concentration == 0.0;
  plan.sample.concentration_g_per_ml = concentration;
  plan.sample.path_length_dm = config.path_length_dm;
  if (!plan.sample.is_blank) plan.sample.model = config.dispersion;
  plan.delta_lambda_nm = delta_lambda;
  plan.pump_nm = config.pump_nm;
  plan.bias_phase_rad = config.bias_phase_rad;
  plan.visibility = config.visibility;
  plan.pair_rate_per_s = config.pair_rate_per_s;
  plan.bin_duration_s = config.bin_duration_s;
  plan.n_bins = config.n_bins;
  plan.rng_seed = seed;
  plan.label = "";
  return plan;
}

// 1. Factor-of-two FI enhancement at unit visibility and optimal bias.
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const double q_mean =
      fi_for_parameter(Scheme::PhiQuantum, Parameter::MeanRotation, pi / 2.0, 1.0, 0.0)
          .fi_per_pair;
  const double c_mean =
      fi_for_parameter(Scheme::ClassicalPair, Parameter::MeanRotation, pi / 2.0, 1.0, 0.0)
          .fi_per_pair;
  const double q_diff =
      fi_for_parameter(Scheme::PsiQuantum, Parameter::DifferenceRotation, pi / 2.0, 1.0, 0.0)
          .fi_per_pair;
  const double c_diff =
      fi_for_parameter(Scheme::ClassicalPair, Parameter::DifferenceRotation, pi / 2.0, 1.0, 0.0)
          .fi_per_pair;
  const bool values_ok = std::abs(q_mean - 16.0) < 1e-9 && std::abs(c_mean - 8.0) < 1e-9 &&
                         std::abs(q_diff - 4.0) < 1e-9 && std::abs(c_diff - 2.0) < 1e-9;
  const bool ratios_ok =
      std::abs(q_mean / c_mean - 2.0) < 1e-9 && std::abs(q_diff / c_diff - 2.0) < 1e-9;
  const double dt = elapsed_s(start);
  report(1, "factor-of-two FI enhancement", values_ok && ratios_ok && dt < 1.0,
         "mean 16/8, difference 4/2, " + fmt(dt) + " s");
}

// 2. Experimental-SEM over classical-CRB ratio at full acquisition statistics.
void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  const GridConfig base = load_default_grid();
  bool all_ok = true;
  std::string detail;
  for (double visibility : {0.914, 0.925, 0.936}) {
    std::vector<double> ratios;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
      GridConfig config = base;
      config.visibility = visibility;
      const std::uint64_t key = static_cast<std::uint64_t>(visibility * 1e6);
      RunPlan blank = grid_run_plan(config, Scheme::PsiQuantum, 0.0, 19.0,
                                    substream_seed(0xACC2, {key, rep, 0}));
      RunPlan sample = grid_run_plan(config, Scheme::PsiQuantum, 0.2, 19.0,
                                     substream_seed(0xACC2, {key, rep, 1}));
      const auto est = extract_rotation(simulate_run(blank), simulate_run(sample),
                                        Scheme::PsiQuantum, visibility);
      ratios.push_back(est.ratio_to_classical_crb);
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    all_ok = all_ok && mean >= 0.75 && mean <= 0.79;
    if (!detail.empty()) detail += ", ";
    detail += "V=" + fmt(visibility) + " -> " + fmt(mean);
  }
  const double dt = elapsed_s(start);
  report(2, "uncertainty ratio in [0.75, 0.79]", all_ok && dt < 60.0,
         detail + ", " + fmt(dt) + " s");
}

// 3. Numeric FI equals the QFI (= 1) at unit visibility.
void criterion_3() {
  const ProbabilityModel model = [](double theta) {
    FringeModel m;
    m.scheme = Scheme::PhiQuantum;
    m.visibility = 1.0;
    const auto p = quantum_probabilities(m, theta);
    return std::vector<double>(p.begin(), p.end());
  };
  const auto generator = theta_generator(Scheme::PhiQuantum);
  const WavelengthPair wl{809.7, 809.7, 404.85};
  double max_dev_numeric = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double theta = pi / 4.0 + (pi / 2.0) * i / 99.0;
    const double qfi = qfi_pure_state(make_phi(theta, wl), generator);
    max_dev_numeric = std::max(max_dev_numeric,
                               std::abs(fisher_information(model, theta) - qfi));
  }
  // The analytic fringe path holds the identity over the full circle.
  double max_dev_analytic = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double theta = two_pi * i / 100.0;
    max_dev_analytic =
        std::max(max_dev_analytic, std::abs(fringe_fisher_information(1.0, theta) - 1.0));
  }
  report(3, "H-V measurement saturates the QFI",
         max_dev_numeric < 1e-9 && max_dev_analytic < 1e-12,
         "max |FI - QFI| numeric " + fmt(max_dev_numeric) + ", analytic " +
             fmt(max_dev_analytic));
}

// 4. FI-curve shape: peak 4 V^2, classical-line crossings, bias translation.
void criterion_4() {
  const double v = 0.92;
  const auto summary = summarize_fi_curve(v, pi / 2.0, -pi / 2.0, pi / 2.0);
  const bool peak_ok = std::abs(summary.max_fi_exp - 4.0 * v * v) < 1e-6;

  // Crossings solve sin^2 theta = (1 - V^2) / V^2 with theta = pi/2 + 2 da;
  // the +-pi/2 span contains the four roots theta in {-tc, tc, pi-tc, pi+tc}.
  const double tc = std::asin(std::sqrt((1.0 - v * v) / (v * v)));
  const double expected_cross[4] = {(-tc - pi / 2.0) / 2.0, (tc - pi / 2.0) / 2.0,
                                    (pi / 2.0 - tc) / 2.0, (pi / 2.0 + tc) / 2.0};
  bool crossings_ok = summary.classical_crossings_rad.size() == 4;
  if (crossings_ok) {
    for (int i = 0; i < 4; ++i) {
      crossings_ok =
          crossings_ok && std::abs(summary.classical_crossings_rad[i] - expected_cross[i]) < 1e-6;
    }
  }

  const double shift = 0.61;
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-pi / 2.0 + pi * i / 400.0);
  const auto base_rows = fi_curve(v, pi / 2.0, grid);
  std::vector<double> shifted_grid = grid;
  for (double& x : shifted_grid) x -= shift / 2.0;
  const auto shifted_rows = fi_curve(v, pi / 2.0 + shift, shifted_grid);
  double max_translation_dev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    max_translation_dev =
        std::max(max_translation_dev, std::abs(shifted_rows[i].fi_exp - base_rows[i].fi_exp));
  }
  report(4, "FI-curve peak, crossings, and bias translation",
         peak_ok && crossings_ok && max_translation_dev < 1e-6,
         "peak " + fmt(summary.max_fi_exp) + ", translation dev " + fmt(max_translation_dev));
}

// 5. Predicted mean ~constant, difference linear through the origin, and
//    recovered estimates doubling with the concentration.
void criterion_5(const GridResult& grid) {
  const GridConfig& config = grid.config;
  Sample sample;
  sample.concentration_g_per_ml = 0.2;
  sample.path_length_dm = config.path_length_dm;
  sample.model = config.dispersion;

  double mean_min = std::numeric_limits<double>::infinity();
  double mean_max = -mean_min;
  std::vector<double> xs, ys;
  for (int i = 0; i <= 19; ++i) {
    const double dl = i;
    const auto summary = mean_and_difference(sample, wavelength_pair(dl, config.pump_nm));
    mean_min = std::min(mean_min, summary.mean_deg);
    mean_max = std::max(mean_max, summary.mean_deg);
    xs.push_back(dl);
    ys.push_back(summary.difference_deg);
  }
  const bool mean_flat = (mean_max - mean_min) / mean_max < 0.01;

  // Least-squares slope through the origin, R^2 about the mean of y.
  double sxy = 0.0, sxx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
    sy += ys[i];
  }
  const double slope = sxy / sxx;
  const double y_mean = sy / static_cast<double>(ys.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ss_res += (ys[i] - slope * xs[i]) * (ys[i] - slope * xs[i]);
    ss_tot += (ys[i] - y_mean) * (ys[i] - y_mean);
  }
  const double r2 = 1.0 - ss_res / ss_tot;
  const bool linear_ok = r2 > 0.9999;

  // Concentration doubling within the combined uncertainty, on the grid run.
  bool doubling_ok = true;
  for (const auto& low : grid.cells) {
    if (low.concentration_g_per_ml != 0.2 || low.status != CellStatus::Ok) continue;
    for (const auto& high : grid.cells) {
      if (high.concentration_g_per_ml != 0.4 || high.scheme != low.scheme ||
          high.delta_lambda_nm != low.delta_lambda_nm || high.status != CellStatus::Ok) {
        continue;
      }
      const double dev = std::abs(high.estimate->value_deg - 2.0 * low.estimate->value_deg);
      const double sigma = std::hypot(high.estimate->pooled_sigma_deg,
                                      2.0 * low.estimate->pooled_sigma_deg);
      doubling_ok = doubling_ok && dev <= sigma;
    }
  }
  report(5, "dispersion-shape predictions and concentration doubling",
         mean_flat && linear_ok && doubling_ok,
         "mean spread " + fmt((mean_max - mean_min) / mean_max * 100.0) + "%, R^2 " + fmt(r2));
}

// 6. Estimator efficiency against the Cramer-Rao bound at full acquisition counts.
void criterion_6() {
  const auto start = std::chrono::steady_clock::now();
  const double visibility = 0.92;
  const GridConfig config = load_default_grid();
  const double n_expected = config.pair_rate_per_s * config.bin_duration_s * config.n_bins;
  bool all_ok = true;
  std::string detail;
  const double thetas[3] = {pi / 4.0, pi / 2.0, 3.0 * pi / 4.0};
  for (int t = 0; t < 3; ++t) {
    std::vector<double> estimates;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      RunPlan plan = grid_run_plan(config, Scheme::PsiQuantum, 0.0, 0.0,
                                   substream_seed(482, {static_cast<std::uint64_t>(t), rep}));
      plan.visibility = visibility;
      plan.bias_phase_rad = thetas[t];
      const auto set = simulate_run(plan);
      estimates.push_back(estimate_theta(set, visibility).theta_rad);
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= static_cast<double>(estimates.size() - 1);
    const double crb = 1.0 / (n_expected * fringe_fisher_information(visibility, thetas[t]));
    all_ok = all_ok && std::abs(var / crb - 1.0) < 0.05;
    if (!detail.empty()) detail += ", ";
    detail += "var/CRB " + fmt(var / crb);
  }
  const double dt = elapsed_s(start);
  report(6, "estimator variance within 5% of the CRB", all_ok && dt < 120.0,
         detail + ", " + fmt(dt) + " s");
}

// 7. Calibration recovers an injected 91.4% visibility to +-0.005.
void criterion_7() {
  const double injected = 0.914;
  int within = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    CalibrationPlan plan;
    plan.scheme = Scheme::PsiQuantum;
    plan.visibility = injected;
    plan.n_settings = 36;
    plan.bins_per_setting = 10;
    plan.rng_seed = substream_seed(0xCA7, {rep});
    const auto curve = fit_calibration(simulate_calibration_sweep(plan));
    if (std::abs(curve.pooled_visibility - injected) <= 0.005) ++within;
  }
  report(7, "calibration recovers the injected visibility", within >= 95,
         std::to_string(within) + "/100 within +-0.005");
}

// 8. Poisson statistics across the default grid.
void criterion_8(const GridResult& grid) {
  int checked = 0;
  int within = 0;
  double worst = 0.0;
  for (const auto& cell : grid.cells) {
    if (cell.status != CellStatus::Ok) continue;
    for (const auto* set : {&cell.blank_set, &cell.sample_set}) {
      for (const auto& d : noise_diagnostics(*set)) {
        ++checked;
        const double pull = std::abs(d.fano - 1.0) / d.fano_sigma;
        worst = std::max(worst, pull);
        if (pull <= 3.0) ++within;
      }
    }
  }
  report(8, "simulated counts are Poisson (Fano = 1 within 3 sigma)",
         checked == 160 && within == checked,
         std::to_string(within) + "/" + std::to_string(checked) + ", worst pull " + fmt(worst));
}

// 9. Scheme insensitivity to the conjugate rotation combination.
void criterion_9() {
  std::mt19937_64 rng(0x15E15);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const WavelengthPair wl{809.7, 809.7, 404.85};
  double worst_phi = 0.0;
  double worst_psi = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double bias = two_pi * uni(rng);
    const double fixed = uni(rng);       // conserved combination
    const double split_a = uni(rng);     // varied combination, two draws
    const double split_b = uni(rng);

    const auto phi = make_phi(bias, wl);
    const auto phi_a = hv_projection_probabilities(
        apply_optical_activity(phi, fixed / 2.0 - split_a, fixed / 2.0 + split_a));
    const auto phi_b = hv_projection_probabilities(
        apply_optical_activity(phi, fixed / 2.0 - split_b, fixed / 2.0 + split_b));

    const auto psi = make_psi(bias, wl);
    const auto psi_a = hv_projection_probabilities(
        apply_optical_activity(psi, split_a, split_a + fixed));
    const auto psi_b = hv_projection_probabilities(
        apply_optical_activity(psi, split_b, split_b + fixed));

    for (int k = 0; k < 4; ++k) {
      worst_phi = std::max(worst_phi, std::abs(phi_a[k] - phi_b[k]));
      worst_psi = std::max(worst_psi, std::abs(psi_a[k] - psi_b[k]));
    }
  }
  report(9, "phi/psi insensitivity to the conjugate rotation",
         worst_phi < 1e-12 && worst_psi < 1e-12,
         "max deviation phi " + fmt(worst_phi) + ", psi " + fmt(worst_psi));
}

// 10. Byte-identical grid bundles for a fixed seed.
void criterion_10(const fs::path& scratch) {
  const fs::path config_path = fs::path(QORD_CONFIG_DIR) / "grid_default.json";
  const fs::path out1 = scratch / "grid_run_a";
  const fs::path out2 = scratch / "grid_run_b";
  const std::string base = std::string(QORD_CLI_PATH) + " grid --config " +
                           config_path.string() + " --quiet --out ";
  const int rc1 = WEXITSTATUS(std::system((base + out1.string()).c_str()));
  const int rc2 = WEXITSTATUS(std::system((base + out2.string()).c_str()));
  bool identical = rc1 == 0 && rc2 == 0;
  std::size_t files = 0;
  if (identical) {
    for (const auto& entry : fs::recursive_directory_iterator(out1)) {
      if (!entry.is_regular_file()) continue;
      ++files;
      const fs::path rel = fs::relative(entry.path(), out1);
      std::ifstream a(entry.path(), std::ios::binary);
      std::ifstream b(out2 / rel, std::ios::binary);
      const std::string sa((std::istreambuf_iterator<char>(a)), {});
      const std::string sb((std::istreambuf_iterator<char>(b)), {});
      if (sa != sb || sa.empty()) {
        identical = false;
        break;
      }
    }
  }
  report(10, "grid outputs are byte-identical across runs", identical && files > 80,
         std::to_string(files) + " files compared, exit codes " + std::to_string(rc1) + "/" +
             std::to_string(rc2));
}

}  // namespace

int main() {
  const fs::path scratch = scratch_dir();

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();

  const GridResult grid = run_experiment_grid(load_default_grid());
  criterion_5(grid);
  criterion_6();
  criterion_7();
  criterion_8(grid);
  criterion_9();
  criterion_10(scratch);

  std::error_code ec;
  fs::remove_all(scratch, ec);

  if (g_failures == 0) {
    std::cout << "all acceptance criteria passed\n";
  } else {
    std::cout << g_failures << " acceptance criteria failed\n";
  }
  return g_failures;
}
