#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qord/measurement.hpp"

using namespace qord;

namespace {

FringeModel quantum_model(Scheme scheme, double bias, double visibility) {
  FringeModel m;
  m.scheme = scheme;
  m.bias_phase_rad = bias;
  m.visibility = visibility;
  return m;
}

FringeModel classical_model(double beta1, double beta2, double visibility) {
  FringeModel m;
  m.scheme = Scheme::ClassicalPair;
  m.beta1_rad = beta1;
  m.beta2_rad = beta2;
  m.visibility = visibility;
  return m;
}

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::PhiQuantum, Scheme::PsiQuantum, Scheme::ClassicalPair}) {
    CHECK(scheme_from_name(scheme_name(s)) == s);
  }
  CHECK_THROWS_AS(scheme_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("fringe phase of the rotations") {
  // Phi: bias - 4 mean.
  CHECK(theta_of_rotations(Scheme::PhiQuantum, 0.0, pi / 8.0, 0.0) ==
        doctest::Approx(-pi / 2.0).epsilon(1e-15));
  // Psi: bias + 2 difference; insensitive to the mean.
  CHECK(theta_of_rotations(Scheme::PsiQuantum, pi / 2.0, 0.123, 0.0) ==
        doctest::Approx(pi / 2.0).epsilon(1e-15));
  // Phi ignores the difference input entirely.
  CHECK(theta_of_rotations(Scheme::PhiQuantum, 0.7, 0.2, 0.4) ==
        theta_of_rotations(Scheme::PhiQuantum, 0.7, 0.2, -1.9));
  CHECK_THROWS_AS(theta_of_rotations(Scheme::ClassicalPair, 0.0, 0.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("quantum fringe probabilities") {
  const auto ideal = quantum_model(Scheme::PhiQuantum, 0.0, 1.0);
  auto p = quantum_probabilities(ideal, 0.0);
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == 0.0);
  CHECK(p[3] == doctest::Approx(0.5).epsilon(1e-15));

  const auto exp92 = quantum_model(Scheme::PsiQuantum, 0.0, 0.92);
  p = quantum_probabilities(exp92, 0.0);
  CHECK(p[0] == doctest::Approx(0.48).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.02).epsilon(1e-13));
  CHECK(p[2] == doctest::Approx(0.02).epsilon(1e-13));
  CHECK(p[3] == doctest::Approx(0.48).epsilon(1e-14));

  for (double v : {0.3, 0.7, 1.0}) {
    p = quantum_probabilities(quantum_model(Scheme::PhiQuantum, 0.0, v), pi / 2.0);
    for (double q : p) CHECK(q == doctest::Approx(0.25).epsilon(1e-14));
  }
}

TEST_CASE("quantum fringe symmetry and normalization") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> theta(-two_pi, two_pi);
  std::uniform_real_distribution<double> vis(0.05, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto model = quantum_model(Scheme::PsiQuantum, 0.0, vis(rng));
    const auto p = quantum_probabilities(model, theta(rng));
    CHECK(p[0] == p[3]);  // HH = VV exactly
    CHECK(p[1] == p[2]);  // HV = VH exactly
    CHECK(std::abs(p[0] + p[1] + p[2] + p[3] - 1.0) < 1e-12);
  }
}

TEST_CASE("finite visibility is a convex blend of fringes and noise") {
  const double v = 0.77;
  for (int i = 0; i <= 64; ++i) {
    const double theta = two_pi * i / 64.0;
    const auto blended = quantum_probabilities(quantum_model(Scheme::PhiQuantum, 0.0, v), theta);
    const auto ideal = quantum_probabilities(quantum_model(Scheme::PhiQuantum, 0.0, 1.0), theta);
    for (int k = 0; k < 4; ++k) {
      CHECK(blended[k] == doctest::Approx(v * ideal[k] + (1.0 - v) * 0.25).epsilon(1e-13));
    }
  }
}

TEST_CASE("visibility validation") {
  CHECK_THROWS_AS(quantum_probabilities(quantum_model(Scheme::PhiQuantum, 0.0, 0.0), 0.1),
                  std::domain_error);
  CHECK_THROWS_AS(quantum_probabilities(quantum_model(Scheme::PhiQuantum, 0.0, 1.2), 0.1),
                  std::domain_error);
  CHECK_THROWS_AS(quantum_probabilities(classical_model(0.0, 0.0, 1.0), 0.1),
                  std::invalid_argument);
}

TEST_CASE("classical per-photon fringes") {
  // Photon aligned with the analyzer: certainly H.
  auto out = classical_probabilities(classical_model(0.0, 0.0, 1.0), 0.0, 0.0);
  CHECK(out.p1_h == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out.joint[0] == doctest::Approx(1.0).epsilon(1e-14));

  // Both photons at half fringe: every joint outcome is 1/4.
  out = classical_probabilities(classical_model(pi / 2.0, pi / 2.0, 1.0), 0.0, 0.0);
  CHECK(out.p1_h == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(out.p2_h == doctest::Approx(0.5).epsilon(1e-14));
  for (double p : out.joint) CHECK(p == doctest::Approx(0.25).epsilon(1e-13));

  CHECK_THROWS_AS(
      classical_probabilities(quantum_model(Scheme::PhiQuantum, 0.0, 1.0), 0.0, 0.0),
      std::invalid_argument);
}

TEST_CASE("classical joint outcomes factorize") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> angle(-pi, pi);
  std::uniform_real_distribution<double> vis(0.1, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto model = classical_model(angle(rng), angle(rng), vis(rng));
    const auto out = classical_probabilities(model, angle(rng), angle(rng));
    CHECK(out.joint[0] == doctest::Approx(out.p1_h * out.p2_h).epsilon(1e-14));
    CHECK(out.joint[1] == doctest::Approx(out.p1_h * (1.0 - out.p2_h)).epsilon(1e-14));
    CHECK(out.joint[2] == doctest::Approx((1.0 - out.p1_h) * out.p2_h).epsilon(1e-14));
    CHECK(out.joint[3] ==
          doctest::Approx((1.0 - out.p1_h) * (1.0 - out.p2_h)).epsilon(1e-14));
    double sum = 0.0;
    for (double p : out.joint) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}
