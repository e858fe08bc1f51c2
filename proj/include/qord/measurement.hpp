#pragma once

// Maps physical rotations to outcome probabilities: finite-visibility
// coincidence fringes for the two entangled-pair schemes, and the separable
// linearly-polarized pair measured photon-by-photon as the classical
// benchmark.

#include <array>
#include <string>

#include "qord/angles.hpp"

namespace qord {

enum class Scheme { PhiQuantum, PsiQuantum, ClassicalPair };

const char* scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);  // "phi", "psi", "classical"

struct FringeModel {
  Scheme scheme = Scheme::PhiQuantum;
  double bias_phase_rad = 0.0;  // quantum schemes
  // Analyzer offsets for the classical scheme; the default half-fringe point
  // maximizes per-photon sensitivity.
  double beta1_rad = pi / 2.0;
  double beta2_rad = pi / 2.0;
  double visibility = 1.0;  // fringe contrast, in (0, 1]

  void validate() const;
};

/// Fringe phase of the evolved pair:
///   PhiQuantum -> bias - 4 * mean,  PsiQuantum -> bias + 2 * difference.
/// Throws std::invalid_argument for the classical scheme.
double theta_of_rotations(Scheme scheme, double bias_phase_rad, double mean_rotation_rad,
                          double difference_rotation_rad);

/// Coincidence probabilities (HH, HV, VH, VV):
///   HH = VV = (1 + V cos theta)/4,  HV = VH = (1 - V cos theta)/4.
std::array<double, 4> quantum_probabilities(const FringeModel& model, double theta_rad);

struct ClassicalOutcome {
  double p1_h = 0.0;  // P(H) for photon 1
  double p2_h = 0.0;  // P(H) for photon 2
  std::array<double, 4> joint{};  // (HH, HV, VH, VV), product of the two photons
};

/// Independent single-photon fringes p_m = (1 + V cos(2 alpha_m + beta_m))/2.
/// Requires scheme == ClassicalPair.
ClassicalOutcome classical_probabilities(const FringeModel& model, double alpha1_rad,
                                         double alpha2_rad);

}  // namespace qord
