#pragma once

// Fisher information, quantum Fisher information, and Cramer-Rao bounds for
// the coincidence-fringe schemes and the classical two-photon benchmark.
// All information quantities are per photon pair and in rad^-2; conversion to
// degrees happens only at the reporting layer.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qord/measurement.hpp"
#include "qord/pair_state.hpp"

namespace qord {

enum class Parameter { Theta, MeanRotation, DifferenceRotation };

const char* parameter_name(Parameter p);

using ProbabilityModel = std::function<std::vector<double>(double)>;

/// I(theta) = sum_i (dp_i/dtheta)^2 / p_i over the model's outcomes, with
/// derivatives from a central difference of the given step. Outcomes with
/// p < p_floor are dropped; their vanishing-probability limit is recovered
/// only by the analytic fringe path. Negative probabilities are a model
/// error (std::domain_error).
double fisher_information(const ProbabilityModel& probs, double theta_rad,
                          double step_rad = 1e-6, double p_floor = 1e-15);

/// Closed form for the four-outcome fringe:
///   I(theta) = V^2 sin^2(theta) / (1 - V^2 cos^2(theta)),
/// evaluated by its limit (V^2 -> 1 at the extremes when V = 1).
double fringe_fisher_information(double visibility, double theta_rad);

/// Classical per-photon FI about its own rotation, from the binary H/V
/// outcome of a single linearly polarized photon:
///   4 V^2 sin^2(2a + b) / (1 - V^2 cos^2(2a + b)).
double classical_single_photon_fi(double visibility, double alpha_rad, double beta_rad);

struct FisherReport {
  Parameter parameter = Parameter::Theta;
  double fi_per_pair = 0.0;
  std::optional<double> qfi_per_pair;  // ideal-state bound; quantum schemes only

  /// Cramer-Rao sigma 1/sqrt(n * FI), radians.
  double crb_sigma(std::uint64_t n_pairs) const;
};

/// FI about the requested parameter at the given operating point.
///
/// Quantum schemes apply the chain rule to the fringe FI: the Phi scheme
/// measures the mean rotation (|dtheta/dmean| = 4, factor 16) and the Psi
/// scheme the rotation difference (|dtheta/ddiff| = 2, factor 4). The
/// classical pair transforms the diagonal per-photon Fisher matrix to
/// (mean, difference) coordinates and profiles out the other parameter,
/// yielding 8 and 2 at unit visibility and optimal bias. Unsupported
/// scheme/parameter combinations throw std::invalid_argument.
FisherReport fi_for_parameter(Scheme scheme, Parameter parameter, double bias_phase_rad,
                              double visibility, double at_value_rad);

/// Diagonal phase generator in the (RR, RL, LR, LL) basis.
struct PhaseGenerator {
  std::array<double, 4> eigenvalues{};
};

/// Generator of the fringe phase theta for each entangled scheme.
PhaseGenerator theta_generator(Scheme scheme);

/// QFI = 4 (<G^2> - <G>^2) for a pure normalized state.
double qfi_pure_state(const TwoPhotonState& state, const PhaseGenerator& generator);

struct FiCurveRow {
  double delta_alpha_rad = 0.0;
  double fi_exp = 0.0;
  double fi_quantum_ideal = 0.0;
  double fi_classical_ideal = 0.0;
};

/// Psi-scheme FI about the rotation difference along a grid: experimental
/// (finite visibility), ideal quantum (constant 4), ideal classical
/// (constant 2).
std::vector<FiCurveRow> fi_curve(double visibility, double bias_phase_rad,
                                 const std::vector<double>& delta_alpha_grid_rad);

struct FiCurveSummary {
  double max_fi_exp = 0.0;
  double delta_alpha_at_max_rad = 0.0;
  double enhancement_ratio = 0.0;      // max experimental FI over the classical line
  double break_even_visibility = 0.0;  // visibility where the peak meets the classical line
  std::vector<double> classical_crossings_rad;  // roots of FI_exp = 2 inside the span
};

FiCurveSummary summarize_fi_curve(double visibility, double bias_phase_rad,
                                  double delta_alpha_min_rad, double delta_alpha_max_rad);

}  // namespace qord
