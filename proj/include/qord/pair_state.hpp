#pragma once

// Two-photon polarization states over the circular basis (RR, RL, LR, LL),
// the optical-activity unitary, and projection onto the H-V basis.
//
// Conventions used throughout:
//   - helicity +1 for L, -1 for R
//   - |H> = (|R> + |L>)/sqrt(2),  |V> = i (|R> - |L>)/sqrt(2)
//   - all angles in radians
//
// With these choices an entangled input with fringe phase theta projects onto
// H/V with probabilities (1 +- cos theta)/4, see measurement.hpp.

#include <array>
#include <complex>

namespace qord {

enum class Polarization { L, R, H, V };

/// Helicity of a circular polarization: +1 for L, -1 for R.
/// Throws std::domain_error for the linear polarizations.
int helicity(Polarization p);

struct WavelengthPair {
  double lambda1_nm = 0.0;  // photon in path 1
  double lambda2_nm = 0.0;  // photon in path 2
  double pump_nm = 0.0;

  // Enforces energy conservation 1/l1 + 1/l2 = 1/pump (1e-9 relative) and
  // the supported 700-900 nm band. Throws std::domain_error.
  void validate() const;
};

// Indices into the ordered two-photon circular basis.
inline constexpr int kRR = 0;
inline constexpr int kRL = 1;
inline constexpr int kLR = 2;
inline constexpr int kLL = 3;

struct TwoPhotonState {
  std::array<std::complex<double>, 4> amplitudes{};  // (RR, RL, LR, LL)
  WavelengthPair wavelengths{};

  double norm_squared() const;
};

/// (|RR> + e^{i bias} |LL>)/sqrt(2); polarization-correlated input.
TwoPhotonState make_phi(double bias_phase_rad, const WavelengthPair& wavelengths);

/// (|RL> + e^{i bias} |LR>)/sqrt(2); polarization-anti-correlated input.
TwoPhotonState make_psi(double bias_phase_rad, const WavelengthPair& wavelengths);

/// Optical activity of a chiral medium: every single-photon circular
/// component with helicity h and rotation alpha_m (photon in path m) picks up
/// exp(-i h alpha_m). Input must be normalized.
TwoPhotonState apply_optical_activity(const TwoPhotonState& state, double alpha1_rad,
                                      double alpha2_rad);

/// Probabilities of projecting both photons onto H or V, ordered
/// (HH, HV, VH, VV). Input must be normalized; output sums to 1.
std::array<double, 4> hv_projection_probabilities(const TwoPhotonState& state);

}  // namespace qord
