#pragma once

// Inversion of coincidence counts into phases and rotations: sinusoidal
// calibration fitting with Poisson weights, maximum-likelihood fringe-phase
// estimation, differential blank-vs-sample extraction of the mean and
// difference rotations, and comparison against the classical Cramer-Rao
// bound.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qord/info_metrics.hpp"
#include "qord/measurement.hpp"

namespace qord {

struct BinCounts {
  std::uint64_t hh = 0;
  std::uint64_t hv = 0;
  std::uint64_t vh = 0;
  std::uint64_t vv = 0;

  std::uint64_t total() const { return hh + hv + vh + vv; }
  std::uint64_t channel(int index) const;  // 0..3 ordered (HH, HV, VH, VV)
};

struct SetMetadata {
  Scheme scheme = Scheme::PhiQuantum;
  double bias_phase_rad = 0.0;
  double visibility = 1.0;
  double lambda1_nm = 809.7;
  double lambda2_nm = 809.7;
  std::string sample_label = "unknown";
  double bin_duration_s = 1.0;
};

struct CoincidenceSet {
  std::vector<BinCounts> bins;
  SetMetadata meta;

  BinCounts totals() const;
  std::uint64_t total_pairs() const;
  double total_duration_s() const { return meta.bin_duration_s * bins.size(); }
  void validate() const;  // non-empty bin list
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Calibration: per-channel sinusoid  N(a0) = T A (1 + v cos(a0 + phi))
// ---------------------------------------------------------------------------

struct SweepPoint {
  double alpha0_rad = 0.0;
  CoincidenceSet counts;
};

struct SinusoidPoint {
  double alpha0_rad = 0.0;
  double counts = 0.0;
  double exposure_s = 1.0;
};

struct ChannelFit {
  double amplitude_per_s = 0.0;
  double visibility = 0.0;
  double phase_rad = 0.0;
  double se_amplitude = 0.0;
  double se_visibility = 0.0;
  double se_phase = 0.0;
  double chi2 = 0.0;
  int n_points = 0;
  int iterations = 0;
};

/// Poisson-weighted least squares (weights 1/max(N, 1)) of the fringe
/// sinusoid: a linearized harmonic seed refined by Levenberg-Marquardt.
/// Standard errors come from the inverse normal matrix at the optimum.
/// Throws FitError with diagnostics if the refinement does not converge.
ChannelFit fit_poisson_sinusoid(const std::vector<SinusoidPoint>& points,
                                int max_iterations = 100);

struct CalibrationCurve {
  std::array<ChannelFit, 4> channels{};  // (HH, HV, VH, VV)
  double pooled_visibility = 0.0;        // inverse-variance weighted over channels
  double se_pooled_visibility = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  // Largest deviation from the expected pi opposition between same-type
  // (HH/VV) and mixed (HV/VH) fitted phases, in units of the combined fit
  // uncertainty.
  double phase_opposition_sigmas = 0.0;
};

/// Fits all four coincidence channels over a bias-phase sweep. Requires at
/// least 8 distinct settings spanning at least one full fringe; a degenerate
/// sweep raises std::invalid_argument.
CalibrationCurve fit_calibration(const std::vector<SweepPoint>& sweep);

// ---------------------------------------------------------------------------
// Fringe-phase point estimation
// ---------------------------------------------------------------------------

struct ThetaEstimate {
  double theta_rad = 0.0;
  double sigma_rad = 0.0;
  std::uint64_t n_pairs = 0;
  double contrast_ratio = 0.0;     // (N_same - N_mixed)/(V N), before clamping
  bool visibility_warning = false;  // |contrast_ratio| exceeded 1 by more than the tolerance
};

// Finite-sample fluctuation can push the contrast slightly past 1/V; beyond
// this tolerance the measurement and the calibrated visibility disagree.
inline constexpr double kContrastClampTolerance = 0.02;

/// MLE of the fringe phase under the four-outcome multinomial
/// p = (1 +- V cos theta)/4:
///   theta = acos(clamp((N_same - N_mixed)/(V N), -1, 1)),  branch in [0, pi],
/// with sigma from the Cramer-Rao bound at the estimate. Zero total counts
/// raise std::invalid_argument.
ThetaEstimate estimate_theta(const BinCounts& totals, double visibility);
ThetaEstimate estimate_theta(const CoincidenceSet& counts, double visibility);

// ---------------------------------------------------------------------------
// Differential rotation extraction
// ---------------------------------------------------------------------------

struct Estimate {
  Parameter parameter = Parameter::MeanRotation;
  Scheme scheme = Scheme::PhiQuantum;
  double value_deg = 0.0;
  // Headline uncertainty: standard error of the mean of the per-bin sample
  // estimates taken against the pooled reference phase.
  double std_error_deg = 0.0;
  // Pooled-inversion uncertainty: reference and sample sigma_theta combined
  // in quadrature with the chain-rule factor.
  double pooled_sigma_deg = 0.0;
  std::uint64_t n_pairs = 0;  // sample-set pairs
  double fi_used_per_rad2 = 0.0;
  double crb_sigma_deg = 0.0;
  double ratio_to_classical_crb = 0.0;
  double theta_ref_rad = 0.0;
  double theta_sample_rad = 0.0;
  std::string sample_label;
  std::string reference_label;
  std::vector<double> per_bin_values_deg;
};

/// Extracts the rotation measured between a blank reference set and a sample
/// set sharing scheme, bias phase, and wavelengths:
///   Phi: mean = (theta_ref - theta_sample)/4,
///   Psi: difference = (theta_sample - theta_ref)/2.
/// Metadata mismatches raise std::invalid_argument.
Estimate extract_rotation(const CoincidenceSet& reference, const CoincidenceSet& sample,
                          Scheme scheme, double visibility);

/// Ideal classical FI about a rotation parameter: 8 (mean) or 2 (difference),
/// in rad^-2.
double classical_ideal_fi(Parameter parameter);

/// std_error divided by the ideal classical Cramer-Rao sigma at n_pairs.
double compare_to_classical_crb(const Estimate& estimate, std::uint64_t n_pairs);

}  // namespace qord
