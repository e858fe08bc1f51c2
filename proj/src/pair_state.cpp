#include "qord/pair_state.hpp"

#include <cmath>
#include <stdexcept>

#include "qord/angles.hpp"

namespace qord {

namespace {

constexpr double kNormTolerance = 1e-9;

void require_normalized(const TwoPhotonState& state) {
  if (std::abs(state.norm_squared() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("two-photon state is not normalized");
  }
}

}  // namespace

int helicity(Polarization p) {
  switch (p) {
    case Polarization::L:
      return +1;
    case Polarization::R:
      return -1;
    default:
      throw std::domain_error("helicity is defined only for circular polarizations");
  }
}

void WavelengthPair::validate() const {
  if (pump_nm <= 0.0) {
    throw std::domain_error("pump wavelength must be positive");
  }
  for (double lambda : {lambda1_nm, lambda2_nm}) {
    if (lambda < 700.0 || lambda > 900.0) {
      throw std::domain_error("photon wavelength outside the supported 700-900 nm band");
    }
  }
  const double lhs = 1.0 / lambda1_nm + 1.0 / lambda2_nm;
  const double rhs = 1.0 / pump_nm;
  if (std::abs(lhs - rhs) > 1e-9 * rhs) {
    throw std::domain_error("wavelength pair violates pump energy conservation");
  }
}

double TwoPhotonState::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amplitudes) sum += std::norm(a);
  return sum;
}

TwoPhotonState make_phi(double bias_phase_rad, const WavelengthPair& wavelengths) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  TwoPhotonState state;
  state.wavelengths = wavelengths;
  state.amplitudes[kRR] = inv_sqrt2;
  state.amplitudes[kLL] = std::polar(inv_sqrt2, bias_phase_rad);
  return state;
}

TwoPhotonState make_psi(double bias_phase_rad, const WavelengthPair& wavelengths) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  TwoPhotonState state;
  state.wavelengths = wavelengths;
  state.amplitudes[kRL] = inv_sqrt2;
  state.amplitudes[kLR] = std::polar(inv_sqrt2, bias_phase_rad);
  return state;
}

TwoPhotonState apply_optical_activity(const TwoPhotonState& state, double alpha1_rad,
                                      double alpha2_rad) {
  require_normalized(state);
  // Helicity of each photon per basis slot, ordered (RR, RL, LR, LL).
  static constexpr int h1[4] = {-1, -1, +1, +1};
  static constexpr int h2[4] = {-1, +1, -1, +1};
  TwoPhotonState out = state;
  for (int k = 0; k < 4; ++k) {
    const double phase = -(h1[k] * alpha1_rad + h2[k] * alpha2_rad);
    out.amplitudes[k] *= std::polar(1.0, phase);
  }
  return out;
}

std::array<double, 4> hv_projection_probabilities(const TwoPhotonState& state) {
  require_normalized(state);
  using cd = std::complex<double>;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  // Rows H, V; columns R, L.
  const cd basis[2][2] = {
      {cd(inv_sqrt2, 0.0), cd(inv_sqrt2, 0.0)},
      {cd(0.0, -inv_sqrt2), cd(0.0, inv_sqrt2)},
  };
  std::array<double, 4> probs{};
  for (int j = 0; j < 2; ++j) {    // photon 1 outcome (0 = H, 1 = V)
    for (int k = 0; k < 2; ++k) {  // photon 2 outcome
      cd amp = 0.0;
      for (int m = 0; m < 2; ++m) {    // photon 1 circular component (0 = R, 1 = L)
        for (int n = 0; n < 2; ++n) {  // photon 2 circular component
          amp += basis[j][m] * basis[k][n] * state.amplitudes[2 * m + n];
        }
      }
      probs[2 * j + k] = std::norm(amp);
    }
  }
  return probs;
}

}  // namespace qord
