#pragma once

// Chiral solution model: multi-term Drude dispersion of the specific
// rotation, rotation angle as a function of concentration and path length,
// and energy-conserving wavelength pairs around the degenerate point.
//
// Units follow the polarimetry convention: specific rotation in
// deg ml g^-1 dm^-1, concentration in g/ml, path length in dm, wavelengths
// in nm. Rotation angles produced here are degrees; callers working in the
// state/measurement layer convert with deg_to_rad.

#include <vector>

#include "qord/pair_state.hpp"

namespace qord {

struct DrudeTerm {
  double a_deg_nm2_ml_per_g_dm = 0.0;
  double lambda0_nm = 0.0;  // resonance; must stay below the 700 nm band edge
};

struct DispersionModel {
  std::vector<DrudeTerm> terms;

  // At least one term, every resonance below 700 nm. Throws std::domain_error.
  void validate() const;
};

struct Sample {
  double concentration_g_per_ml = 0.0;
  double path_length_dm = 0.2;
  DispersionModel model;
  bool is_blank = false;  // water reference, rotation identically zero

  void validate() const;
};

/// Raw Drude sum  sum_k A_k / (lambda^2 - lambda0_k^2)  with no band check;
/// exposed for evaluating configured constants outside the validated range.
double evaluate_drude(const DispersionModel& model, double lambda_nm);

/// Specific rotation [alpha](lambda) in deg ml g^-1 dm^-1.
/// lambda must lie in [700, 900] nm; throws std::domain_error otherwise.
double specific_rotation(const DispersionModel& model, double lambda_nm);

/// alpha(C, lambda) = [alpha](lambda) * C * L in degrees; 0 for blanks.
double rotation_angle_deg(const Sample& sample, double lambda_nm);

struct RotationSummary {
  double mean_deg = 0.0;        // (alpha(lambda1) + alpha(lambda2)) / 2
  double difference_deg = 0.0;  // alpha(lambda2) - alpha(lambda1)
};

RotationSummary mean_and_difference(const Sample& sample, const WavelengthPair& pair);

/// Solves 1/l1 + 1/l2 = 1/pump with l2 - l1 = delta_lambda, returning the
/// root with l1 <= l2. delta_lambda must lie in [0, 20] nm and the resulting
/// pair inside the supported band; throws std::domain_error otherwise.
WavelengthPair wavelength_pair(double delta_lambda_nm, double pump_nm);

}  // namespace qord
