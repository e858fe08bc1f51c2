#include "qord/chiral_sample.hpp"

#include <cmath>
#include <stdexcept>

namespace qord {

void DispersionModel::validate() const {
  if (terms.empty()) {
    throw std::domain_error("dispersion model needs at least one Drude term");
  }
  for (const auto& term : terms) {
    if (term.lambda0_nm < 0.0 || term.lambda0_nm >= 700.0) {
      throw std::domain_error("Drude resonance must lie below the 700 nm band edge");
    }
  }
}

void Sample::validate() const {
  if (concentration_g_per_ml < 0.0) {
    throw std::domain_error("concentration must be non-negative");
  }
  if (path_length_dm <= 0.0) {
    throw std::domain_error("path length must be positive");
  }
  if (!is_blank && concentration_g_per_ml > 0.0) {
    model.validate();
  }
}

double evaluate_drude(const DispersionModel& model, double lambda_nm) {
  double sum = 0.0;
  for (const auto& term : model.terms) {
    sum += term.a_deg_nm2_ml_per_g_dm /
           (lambda_nm * lambda_nm - term.lambda0_nm * term.lambda0_nm);
  }
  return sum;
}

double specific_rotation(const DispersionModel& model, double lambda_nm) {
  if (lambda_nm < 700.0 || lambda_nm > 900.0) {
    throw std::domain_error("wavelength outside the validated 700-900 nm band");
  }
  model.validate();
  return evaluate_drude(model, lambda_nm);
}

double rotation_angle_deg(const Sample& sample, double lambda_nm) {
  sample.validate();
  if (sample.is_blank || sample.concentration_g_per_ml == 0.0) {
    return 0.0;
  }
  return specific_rotation(sample.model, lambda_nm) * sample.concentration_g_per_ml *
         sample.path_length_dm;
}

RotationSummary mean_and_difference(const Sample& sample, const WavelengthPair& pair) {
  pair.validate();
  const double a1 = rotation_angle_deg(sample, pair.lambda1_nm);
  const double a2 = rotation_angle_deg(sample, pair.lambda2_nm);
  return {0.5 * (a1 + a2), a2 - a1};
}

WavelengthPair wavelength_pair(double delta_lambda_nm, double pump_nm) {
  if (pump_nm <= 0.0) {
    throw std::domain_error("pump wavelength must be positive");
  }
  if (delta_lambda_nm < 0.0 || delta_lambda_nm > 20.0) {
    throw std::domain_error("wavelength separation must lie in [0, 20] nm");
  }
  // 1/l1 + 1/l2 = 1/p and l2 = l1 + d reduce to
  //   l1^2 + (d - 2p) l1 - p d = 0,
  // whose positive root is l1 = ((2p - d) + sqrt(4p^2 + d^2)) / 2.
  const double disc = 4.0 * pump_nm * pump_nm + delta_lambda_nm * delta_lambda_nm;
  WavelengthPair pair;
  pair.pump_nm = pump_nm;
  pair.lambda1_nm = 0.5 * ((2.0 * pump_nm - delta_lambda_nm) + std::sqrt(disc));
  pair.lambda2_nm = pair.lambda1_nm + delta_lambda_nm;
  pair.validate();
  return pair;
}

}  // namespace qord
