#include "qord/info_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qord {

namespace {

void require_visibility(double visibility) {
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw std::domain_error("visibility must lie in (0, 1]");
  }
}

double psi_fi_about_difference(double visibility, double bias_phase_rad,
                               double delta_alpha_rad) {
  const double theta = bias_phase_rad + 2.0 * delta_alpha_rad;
  return 4.0 * fringe_fisher_information(visibility, theta);
}

}  // namespace

const char* parameter_name(Parameter p) {
  switch (p) {
    case Parameter::Theta:
      return "theta";
    case Parameter::MeanRotation:
      return "mean_rotation";
    case Parameter::DifferenceRotation:
      return "difference_rotation";
  }
  throw std::invalid_argument("unknown parameter");
}

double fisher_information(const ProbabilityModel& probs, double theta_rad, double step_rad,
                          double p_floor) {
  const std::vector<double> p0 = probs(theta_rad);
  const std::vector<double> pp = probs(theta_rad + step_rad);
  const std::vector<double> pm = probs(theta_rad - step_rad);
  if (p0.size() != pp.size() || p0.size() != pm.size()) {
    throw std::domain_error("probability model changed its outcome count");
  }
  double info = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    if (p0[i] < 0.0) {
      throw std::domain_error("probability model produced a negative probability");
    }
    if (p0[i] < p_floor) continue;
    const double dp = (pp[i] - pm[i]) / (2.0 * step_rad);
    info += dp * dp / p0[i];
  }
  return info;
}

double fringe_fisher_information(double visibility, double theta_rad) {
  require_visibility(visibility);
  const double v2 = visibility * visibility;
  const double s = std::sin(theta_rad);
  const double c = std::cos(theta_rad);
  const double denom = 1.0 - v2 * c * c;
  if (denom <= 0.0) {
    // Only reachable at V = 1 and sin(theta) = 0, where the ratio tends to V^2.
    return v2;
  }
  return v2 * s * s / denom;
}

double classical_single_photon_fi(double visibility, double alpha_rad, double beta_rad) {
  // Same fringe algebra at twice the angle; the factor 4 is (d/dalpha of 2a)^2.
  return 4.0 * fringe_fisher_information(visibility, 2.0 * alpha_rad + beta_rad);
}

double FisherReport::crb_sigma(std::uint64_t n_pairs) const {
  if (n_pairs == 0 || fi_per_pair <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 1.0 / std::sqrt(static_cast<double>(n_pairs) * fi_per_pair);
}

FisherReport fi_for_parameter(Scheme scheme, Parameter parameter, double bias_phase_rad,
                              double visibility, double at_value_rad) {
  require_visibility(visibility);
  FisherReport report;
  report.parameter = parameter;

  if (scheme == Scheme::PhiQuantum || scheme == Scheme::PsiQuantum) {
    if (parameter == Parameter::Theta) {
      report.fi_per_pair = fringe_fisher_information(visibility, at_value_rad);
      report.qfi_per_pair = 1.0;
      return report;
    }
    if (scheme == Scheme::PhiQuantum && parameter == Parameter::MeanRotation) {
      const double theta = theta_of_rotations(scheme, bias_phase_rad, at_value_rad, 0.0);
      report.fi_per_pair = 16.0 * fringe_fisher_information(visibility, theta);
      report.qfi_per_pair = 16.0;
      return report;
    }
    if (scheme == Scheme::PsiQuantum && parameter == Parameter::DifferenceRotation) {
      const double theta = theta_of_rotations(scheme, bias_phase_rad, 0.0, at_value_rad);
      report.fi_per_pair = 4.0 * fringe_fisher_information(visibility, theta);
      report.qfi_per_pair = 4.0;
      return report;
    }
    throw std::invalid_argument(
        "scheme is insensitive to the requested parameter (phi measures the mean, psi the "
        "difference)");
  }

  // Classical pair: two independent photons, Fisher matrix diag(I1, I2) in
  // (alpha1, alpha2), transformed to (mean, difference) coordinates via
  // alpha1 = mean - diff/2, alpha2 = mean + diff/2. The entry for the
  // requested parameter is profiled against the other one.
  if (parameter == Parameter::Theta) {
    throw std::invalid_argument("the classical pair has no fringe-phase parameter");
  }
  const double mean = parameter == Parameter::MeanRotation ? at_value_rad : 0.0;
  const double diff = parameter == Parameter::DifferenceRotation ? at_value_rad : 0.0;
  const double alpha1 = mean - 0.5 * diff;
  const double alpha2 = mean + 0.5 * diff;
  const double i1 = classical_single_photon_fi(visibility, alpha1, bias_phase_rad);
  const double i2 = classical_single_photon_fi(visibility, alpha2, bias_phase_rad);
  const double f_mm = i1 + i2;                // mean-mean
  const double f_dd = 0.25 * (i1 + i2);       // diff-diff
  const double f_md = 0.5 * (i2 - i1);        // cross term
  if (parameter == Parameter::MeanRotation) {
    report.fi_per_pair = f_dd > 0.0 ? f_mm - f_md * f_md / f_dd : f_mm;
  } else {
    report.fi_per_pair = f_mm > 0.0 ? f_dd - f_md * f_md / f_mm : f_dd;
  }
  return report;
}

PhaseGenerator theta_generator(Scheme scheme) {
  switch (scheme) {
    case Scheme::PhiQuantum:
      return {{0.0, 0.0, 0.0, 1.0}};  // phase rides on LL relative to RR
    case Scheme::PsiQuantum:
      return {{0.0, 0.0, 1.0, 0.0}};  // phase rides on LR relative to RL
    default:
      throw std::invalid_argument("fringe-phase generator exists for the quantum schemes only");
  }
}

double qfi_pure_state(const TwoPhotonState& state, const PhaseGenerator& generator) {
  if (std::abs(state.norm_squared() - 1.0) > 1e-9) {
    throw std::invalid_argument("QFI of a pure state requires a normalized state");
  }
  double mean = 0.0;
  double second = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double w = std::norm(state.amplitudes[k]);
    mean += w * generator.eigenvalues[k];
    second += w * generator.eigenvalues[k] * generator.eigenvalues[k];
  }
  return 4.0 * (second - mean * mean);
}

std::vector<FiCurveRow> fi_curve(double visibility, double bias_phase_rad,
                                 const std::vector<double>& delta_alpha_grid_rad) {
  require_visibility(visibility);
  std::vector<FiCurveRow> rows;
  rows.reserve(delta_alpha_grid_rad.size());
  for (double da : delta_alpha_grid_rad) {
    rows.push_back({da, psi_fi_about_difference(visibility, bias_phase_rad, da), 4.0, 2.0});
  }
  return rows;
}

FiCurveSummary summarize_fi_curve(double visibility, double bias_phase_rad,
                                  double delta_alpha_min_rad, double delta_alpha_max_rad) {
  require_visibility(visibility);
  if (!(delta_alpha_min_rad < delta_alpha_max_rad)) {
    throw std::invalid_argument("empty FI-curve span");
  }
  const auto fi_at = [&](double da) {
    return psi_fi_about_difference(visibility, bias_phase_rad, da);
  };

  FiCurveSummary summary;
  summary.break_even_visibility = std::sqrt(0.5);

  // Dense scan, then golden-section polish of the best bracket.
  constexpr int kScan = 4096;
  const double span = delta_alpha_max_rad - delta_alpha_min_rad;
  double best_x = delta_alpha_min_rad;
  double best_f = fi_at(best_x);
  for (int i = 1; i <= kScan; ++i) {
    const double x = delta_alpha_min_rad + span * i / kScan;
    const double f = fi_at(x);
    if (f > best_f) {
      best_f = f;
      best_x = x;
    }
  }
  double lo = std::max(delta_alpha_min_rad, best_x - span / kScan);
  double hi = std::min(delta_alpha_max_rad, best_x + span / kScan);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = fi_at(x1);
  double f2 = fi_at(x2);
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = fi_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = fi_at(x1);
    }
  }
  summary.delta_alpha_at_max_rad = 0.5 * (lo + hi);
  summary.max_fi_exp = fi_at(summary.delta_alpha_at_max_rad);
  if (best_f > summary.max_fi_exp) {
    summary.max_fi_exp = best_f;
    summary.delta_alpha_at_max_rad = best_x;
  }
  summary.enhancement_ratio = summary.max_fi_exp / 2.0;

  // Crossings of the classical line by bisection on sign changes.
  const auto excess = [&](double da) { return fi_at(da) - 2.0; };
  double prev_x = delta_alpha_min_rad;
  double prev_e = excess(prev_x);
  for (int i = 1; i <= kScan; ++i) {
    const double x = delta_alpha_min_rad + span * i / kScan;
    const double e = excess(x);
    if ((prev_e < 0.0 && e >= 0.0) || (prev_e >= 0.0 && e < 0.0)) {
      double a = prev_x, b = x, ea = prev_e;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double em = excess(m);
        if ((ea < 0.0) == (em < 0.0)) {
          a = m;
          ea = em;
        } else {
          b = m;
        }
        if (b - a < 1e-14) break;
      }
      summary.classical_crossings_rad.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_e = e;
  }
  return summary;
}

}  // namespace qord
