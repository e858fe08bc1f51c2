#include "qord/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace qord {

const char* scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::PhiQuantum:
      return "phi";
    case Scheme::PsiQuantum:
      return "psi";
    case Scheme::ClassicalPair:
      return "classical";
  }
  throw std::invalid_argument("unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "phi") return Scheme::PhiQuantum;
  if (name == "psi") return Scheme::PsiQuantum;
  if (name == "classical") return Scheme::ClassicalPair;
  throw std::invalid_argument("unknown scheme name: " + name);
}

void FringeModel::validate() const {
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw std::domain_error("visibility must lie in (0, 1]");
  }
}

double theta_of_rotations(Scheme scheme, double bias_phase_rad, double mean_rotation_rad,
                          double difference_rotation_rad) {
  switch (scheme) {
    case Scheme::PhiQuantum:
      return bias_phase_rad - 4.0 * mean_rotation_rad;
    case Scheme::PsiQuantum:
      return bias_phase_rad + 2.0 * difference_rotation_rad;
    default:
      throw std::invalid_argument("fringe phase is defined for the quantum schemes only");
  }
}

std::array<double, 4> quantum_probabilities(const FringeModel& model, double theta_rad) {
  model.validate();
  if (model.scheme == Scheme::ClassicalPair) {
    throw std::invalid_argument("quantum fringes require an entangled-pair scheme");
  }
  const double c = model.visibility * std::cos(theta_rad);
  const double same = 0.25 * (1.0 + c);
  const double mixed = 0.25 * (1.0 - c);
  return {same, mixed, mixed, same};
}

ClassicalOutcome classical_probabilities(const FringeModel& model, double alpha1_rad,
                                         double alpha2_rad) {
  model.validate();
  if (model.scheme != Scheme::ClassicalPair) {
    throw std::invalid_argument("classical probabilities require the classical scheme");
  }
  ClassicalOutcome out;
  out.p1_h = 0.5 * (1.0 + model.visibility * std::cos(2.0 * alpha1_rad + model.beta1_rad));
  out.p2_h = 0.5 * (1.0 + model.visibility * std::cos(2.0 * alpha2_rad + model.beta2_rad));
  out.joint = {out.p1_h * out.p2_h, out.p1_h * (1.0 - out.p2_h),
               (1.0 - out.p1_h) * out.p2_h, (1.0 - out.p1_h) * (1.0 - out.p2_h)};
  return out;
}

}  // namespace qord
