#include "qord/protocol.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace qord {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BinCounts split_multinomial(std::mt19937_64& rng, std::uint64_t total,
                            const std::array<double, 4>& probs) {
  std::array<std::uint64_t, 4> counts{};
  std::uint64_t remaining = total;
  double prob_left = 1.0;
  for (int k = 0; k < 3; ++k) {
    if (remaining == 0) break;
    const double p = std::clamp(probs[k] / prob_left, 0.0, 1.0);
    std::binomial_distribution<std::uint64_t> binom(remaining, p);
    counts[k] = binom(rng);
    remaining -= counts[k];
    prob_left -= probs[k];
  }
  counts[3] = remaining;
  return {counts[0], counts[1], counts[2], counts[3]};
}

std::string sample_label_for(const Sample& sample) {
  if (sample.is_blank || sample.concentration_g_per_ml == 0.0) {
    return "water";
  }
  std::ostringstream oss;
  oss.setf(std::ios::fixed);
  oss.precision(3);
  oss << "sucrose_" << sample.concentration_g_per_ml;
  return oss.str();
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master,
                             std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t c : coords) {
    h = mix64(h ^ (c + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  }
  return h;
}

void RunPlan::validate() const {
  if (scheme != Scheme::PhiQuantum && scheme != Scheme::PsiQuantum) {
    throw std::invalid_argument(
        "the classical benchmark is analytic; coincidence runs use the phi or psi scheme");
  }
  sample.validate();
  if (!(pair_rate_per_s > 0.0)) throw std::invalid_argument("pair rate must be positive");
  if (n_bins < 1) throw std::invalid_argument("a run needs at least one bin");
  if (!(bin_duration_s > 0.0)) throw std::invalid_argument("bin duration must be positive");
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw std::invalid_argument("visibility must lie in (0, 1]");
  }
}

CoincidenceSet simulate_run(const RunPlan& plan) {
  plan.validate();
  const WavelengthPair pair = wavelength_pair(plan.delta_lambda_nm, plan.pump_nm);
  const RotationSummary rotations = mean_and_difference(plan.sample, pair);
  const double theta =
      theta_of_rotations(plan.scheme, plan.bias_phase_rad, deg_to_rad(rotations.mean_deg),
                         deg_to_rad(rotations.difference_deg));
  FringeModel model;
  model.scheme = plan.scheme;
  model.bias_phase_rad = plan.bias_phase_rad;
  model.visibility = plan.visibility;
  const std::array<double, 4> probs = quantum_probabilities(model, theta);

  std::mt19937_64 rng(plan.rng_seed);
  CoincidenceSet set;
  set.bins.reserve(plan.n_bins);
  for (int bin = 0; bin < plan.n_bins; ++bin) {
    const double t0 = bin * plan.bin_duration_s;
    const double rate = plan.pair_rate_per_s * (1.0 + plan.rate_drift_per_s * t0);
    const double mean = std::max(rate, 0.0) * plan.bin_duration_s;
    std::poisson_distribution<std::uint64_t> poisson(mean);
    const std::uint64_t total = mean > 0.0 ? poisson(rng) : 0;
    set.bins.push_back(split_multinomial(rng, total, probs));
  }
  set.meta.scheme = plan.scheme;
  set.meta.bias_phase_rad = plan.bias_phase_rad;
  set.meta.visibility = plan.visibility;
  set.meta.lambda1_nm = pair.lambda1_nm;
  set.meta.lambda2_nm = pair.lambda2_nm;
  set.meta.sample_label = plan.label.empty() ? sample_label_for(plan.sample) : plan.label;
  set.meta.bin_duration_s = plan.bin_duration_s;
  return set;
}

void CalibrationPlan::validate() const {
  if (scheme != Scheme::PhiQuantum && scheme != Scheme::PsiQuantum) {
    throw std::invalid_argument("calibration sweeps use the phi or psi scheme");
  }
  if (explicit_settings_rad.empty()) {
    if (n_settings < 8) throw std::invalid_argument("a sweep needs at least 8 settings");
    if (!(span_rad > 0.0)) throw std::invalid_argument("sweep span must be positive");
  }
  if (bins_per_setting < 1) throw std::invalid_argument("bins per setting must be positive");
  if (!(bin_duration_s > 0.0)) throw std::invalid_argument("bin duration must be positive");
  if (!(pair_rate_per_s > 0.0)) throw std::invalid_argument("pair rate must be positive");
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw std::invalid_argument("visibility must lie in (0, 1]");
  }
}

std::vector<double> CalibrationPlan::settings_rad() const {
  if (!explicit_settings_rad.empty()) {
    return explicit_settings_rad;
  }
  std::vector<double> settings(n_settings);
  for (int i = 0; i < n_settings; ++i) {
    settings[i] = span_rad * i / n_settings;
  }
  return settings;
}

std::vector<SweepPoint> simulate_calibration_sweep(const CalibrationPlan& plan) {
  plan.validate();
  const std::vector<double> settings = plan.settings_rad();
  std::vector<SweepPoint> sweep;
  sweep.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    RunPlan run;
    run.scheme = plan.scheme;
    run.sample.is_blank = true;
    run.sample.concentration_g_per_ml = 0.0;
    run.delta_lambda_nm = plan.delta_lambda_nm;
    run.pump_nm = plan.pump_nm;
    run.bias_phase_rad = settings[i];
    run.visibility = plan.visibility;
    run.pair_rate_per_s = plan.pair_rate_per_s;
    run.bin_duration_s = plan.bin_duration_s;
    run.n_bins = plan.bins_per_setting;
    run.rng_seed = substream_seed(plan.rng_seed, {0x5eed, i});
    run.label = "calibration";
    sweep.push_back({settings[i], simulate_run(run)});
  }
  return sweep;
}

std::array<ChannelDiagnostics, 4> noise_diagnostics(const CoincidenceSet& counts) {
  counts.validate();
  const std::size_t n = counts.bins.size();
  if (n < 30) {
    throw std::invalid_argument("noise diagnostics need at least 30 bins");
  }
  std::array<ChannelDiagnostics, 4> diags{};
  for (int channel = 0; channel < 4; ++channel) {
    double mean = 0.0;
    for (const auto& bin : counts.bins) mean += static_cast<double>(bin.channel(channel));
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& bin : counts.bins) {
      const double d = static_cast<double>(bin.channel(channel)) - mean;
      ss += d * d;
    }
    const double variance = ss / static_cast<double>(n - 1);
    ChannelDiagnostics d;
    d.mean = mean;
    d.variance = variance;
    d.fano = mean > 0.0 ? variance / mean : 0.0;
    d.fano_sigma = std::sqrt(2.0 / static_cast<double>(n - 1));
    diags[channel] = d;
  }
  return diags;
}

void GridConfig::validate() const {
  if (schemes.empty() || concentrations_g_per_ml.empty() || delta_lambdas_nm.empty()) {
    throw std::invalid_argument("grid config needs schemes, concentrations, and separations");
  }
  for (Scheme s : schemes) {
    if (s == Scheme::ClassicalPair) {
      throw std::invalid_argument("grid runs cover the quantum schemes only");
    }
  }
  for (double c : concentrations_g_per_ml) {
    if (c < 0.0) throw std::invalid_argument("concentrations must be non-negative");
  }
  bool any_nonzero = false;
  for (double c : concentrations_g_per_ml) any_nonzero |= c > 0.0;
  if (any_nonzero) dispersion.validate();
  if (!(path_length_dm > 0.0)) throw std::invalid_argument("path length must be positive");
  if (!(pair_rate_per_s > 0.0)) throw std::invalid_argument("pair rate must be positive");
  if (n_bins < 1) throw std::invalid_argument("grid runs need at least one bin");
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw std::invalid_argument("visibility must lie in (0, 1]");
  }
}

bool GridResult::all_ok() const {
  for (const auto& cell : cells) {
    if (cell.status != CellStatus::Ok) return false;
  }
  return true;
}

bool GridResult::any_ok() const {
  for (const auto& cell : cells) {
    if (cell.status == CellStatus::Ok) return true;
  }
  return false;
}

GridResult run_experiment_grid(const GridConfig& config) {
  config.validate();
  GridResult result;
  result.config = config;
  for (std::size_t si = 0; si < config.schemes.size(); ++si) {
    for (std::size_t ci = 0; ci < config.concentrations_g_per_ml.size(); ++ci) {
      for (std::size_t di = 0; di < config.delta_lambdas_nm.size(); ++di) {
        GridCell cell;
        cell.scheme = config.schemes[si];
        cell.concentration_g_per_ml = config.concentrations_g_per_ml[ci];
        cell.delta_lambda_nm = config.delta_lambdas_nm[di];
        cell.seed_blank = substream_seed(config.master_seed, {si, ci, di, 0});
        cell.seed_sample = substream_seed(config.master_seed, {si, ci, di, 1});
        try {
          const auto rate_for = [&](bool blank) {
            for (const auto& o : config.rate_overrides) {
              if (o.scheme == cell.scheme && o.blank == blank &&
                  std::abs(o.concentration_g_per_ml - cell.concentration_g_per_ml) < 1e-12 &&
                  std::abs(o.delta_lambda_nm - cell.delta_lambda_nm) < 1e-12) {
                return o.pair_rate_per_s;
              }
            }
            return config.pair_rate_per_s;
          };

          RunPlan blank_plan;
          blank_plan.scheme = cell.scheme;
          blank_plan.sample.is_blank = true;
          blank_plan.sample.path_length_dm = config.path_length_dm;
          blank_plan.delta_lambda_nm = cell.delta_lambda_nm;
          blank_plan.pump_nm = config.pump_nm;
          blank_plan.bias_phase_rad = config.bias_phase_rad;
          blank_plan.visibility = config.visibility;
          blank_plan.pair_rate_per_s = rate_for(true);
          blank_plan.bin_duration_s = config.bin_duration_s;
          blank_plan.n_bins = config.n_bins;
          blank_plan.rng_seed = cell.seed_blank;
          blank_plan.label = "";

          RunPlan sample_plan = blank_plan;
          sample_plan.sample.is_blank = false;
          sample_plan.sample.concentration_g_per_ml = cell.concentration_g_per_ml;
          sample_plan.sample.model = config.dispersion;
          sample_plan.pair_rate_per_s = rate_for(false);
          sample_plan.rng_seed = cell.seed_sample;

          cell.blank_set = simulate_run(blank_plan);
          cell.sample_set = simulate_run(sample_plan);
          cell.estimate = extract_rotation(cell.blank_set, cell.sample_set, cell.scheme,
                                           config.visibility);
          const RotationSummary predicted = mean_and_difference(
              sample_plan.sample, wavelength_pair(cell.delta_lambda_nm, config.pump_nm));
          cell.prediction_deg = cell.scheme == Scheme::PhiQuantum ? predicted.mean_deg
                                                                  : predicted.difference_deg;
          cell.status = CellStatus::Ok;
        } catch (const std::exception& e) {
          cell.status = CellStatus::Failed;
          cell.error = e.what();
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

}  // namespace qord
