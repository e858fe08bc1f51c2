#include "qord/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "qord/angles.hpp"

namespace qord {

namespace {

void require_visibility(double visibility) {
  if (!(visibility > 0.0) || visibility > 1.0) {
    throw std::domain_error("visibility must lie in (0, 1]");
  }
}

double weighted_chi2(const std::vector<SinusoidPoint>& pts, const std::vector<double>& w,
                     double a, double v, double phi) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double model =
        pts[i].exposure_s * a * (1.0 + v * std::cos(pts[i].alpha0_rad + phi));
    const double d = pts[i].counts - model;
    chi2 += w[i] * d * d;
  }
  return chi2;
}

}  // namespace

std::uint64_t BinCounts::channel(int index) const {
  switch (index) {
    case 0:
      return hh;
    case 1:
      return hv;
    case 2:
      return vh;
    case 3:
      return vv;
    default:
      throw std::out_of_range("channel index must be 0..3");
  }
}

BinCounts CoincidenceSet::totals() const {
  BinCounts t;
  for (const auto& b : bins) {
    t.hh += b.hh;
    t.hv += b.hv;
    t.vh += b.vh;
    t.vv += b.vv;
  }
  return t;
}

std::uint64_t CoincidenceSet::total_pairs() const { return totals().total(); }

void CoincidenceSet::validate() const {
  if (bins.empty()) {
    throw std::invalid_argument("coincidence set has no bins");
  }
  if (meta.bin_duration_s <= 0.0) {
    throw std::invalid_argument("bin duration must be positive");
  }
}

ChannelFit fit_poisson_sinusoid(const std::vector<SinusoidPoint>& points, int max_iterations) {
  if (points.size() < 4) {
    throw std::invalid_argument("sinusoid fit needs at least 4 points");
  }
  std::vector<double> w(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].counts < 0.0 || points[i].exposure_s <= 0.0) {
      throw std::invalid_argument("sinusoid fit needs non-negative counts and positive exposure");
    }
    w[i] = 1.0 / std::max(points[i].counts, 1.0);
  }

  // Harmonic seed: y ~ T (P + Q cos a + R sin a) is linear in (P, Q, R).
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = points[i].exposure_s;
    const Eigen::Vector3d x(t, t * std::cos(points[i].alpha0_rad),
                            t * std::sin(points[i].alpha0_rad));
    m += w[i] * x * x.transpose();
    rhs += w[i] * points[i].counts * x;
  }
  const Eigen::Vector3d seed = m.ldlt().solve(rhs);
  double a = seed[0];
  if (!(a > 0.0)) {
    throw FitError("sinusoid fit: non-positive amplitude seed");
  }
  double v = std::hypot(seed[1], seed[2]) / a;
  double phi = std::atan2(-seed[2], seed[1]);

  // Levenberg-Marquardt refinement of (A, v, phi).
  double chi2 = weighted_chi2(points, w, a, v, phi);
  double lambda = 1e-3;
  int iterations = 0;
  bool converged = false;
  for (; iterations < max_iterations && !converged; ++iterations) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double t = points[i].exposure_s;
      const double c = std::cos(points[i].alpha0_rad + phi);
      const double s = std::sin(points[i].alpha0_rad + phi);
      const double model = t * a * (1.0 + v * c);
      const Eigen::Vector3d g(t * (1.0 + v * c), t * a * c, -t * a * v * s);
      jtj += w[i] * g * g.transpose();
      jtr += w[i] * (points[i].counts - model) * g;
    }
    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::Matrix3d damped = jtj;
      for (int k = 0; k < 3; ++k) damped(k, k) *= (1.0 + lambda);
      const Eigen::Vector3d step = damped.ldlt().solve(jtr);
      const double a2 = a + step[0];
      const double v2 = v + step[1];
      const double phi2 = phi + step[2];
      const double chi2_new = weighted_chi2(points, w, a2, v2, phi2);
      if (std::isfinite(chi2_new) && chi2_new <= chi2 * (1.0 + 1e-14) + 1e-14) {
        const double rel_step =
            std::max({std::abs(step[0]) / std::max(std::abs(a), 1e-30),
                      std::abs(step[1]), std::abs(step[2])});
        if (chi2 - chi2_new <= 1e-12 * (1.0 + chi2) && rel_step < 1e-9) {
          converged = true;
        }
        a = a2;
        v = v2;
        phi = phi2;
        chi2 = chi2_new;
        lambda = std::max(lambda * 0.3, 1e-14);
        accepted = true;
      } else {
        lambda *= 8.0;
      }
    }
    if (!accepted) {
      converged = true;  // damping saturated: already at a (local) optimum
    }
  }
  if (!converged) {
    std::ostringstream oss;
    oss << "sinusoid fit did not converge after " << max_iterations
        << " iterations (chi2 = " << chi2 << ", A = " << a << ", v = " << v
        << ", phi = " << phi << ")";
    throw FitError(oss.str());
  }

  // Canonical form: non-negative contrast, phase in (-pi, pi].
  if (v < 0.0) {
    v = -v;
    phi += pi;
  }
  phi = wrap_angle(phi);

  // Covariance from the undamped normal matrix at the optimum.
  Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = points[i].exposure_s;
    const double c = std::cos(points[i].alpha0_rad + phi);
    const double s = std::sin(points[i].alpha0_rad + phi);
    const Eigen::Vector3d g(t * (1.0 + v * c), t * a * c, -t * a * v * s);
    jtj += w[i] * g * g.transpose();
  }
  const Eigen::Matrix3d cov = jtj.inverse();

  ChannelFit fit;
  fit.amplitude_per_s = a;
  fit.visibility = v;
  fit.phase_rad = phi;
  fit.se_amplitude = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.se_visibility = std::sqrt(std::max(cov(1, 1), 0.0));
  fit.se_phase = std::sqrt(std::max(cov(2, 2), 0.0));
  fit.chi2 = chi2;
  fit.n_points = static_cast<int>(points.size());
  fit.iterations = iterations;
  return fit;
}

CalibrationCurve fit_calibration(const std::vector<SweepPoint>& sweep) {
  if (sweep.empty()) {
    throw std::invalid_argument("calibration sweep is empty");
  }
  std::set<long long> distinct;
  double min_a = sweep.front().alpha0_rad;
  double max_a = min_a;
  for (const auto& point : sweep) {
    point.counts.validate();
    distinct.insert(std::llround(point.alpha0_rad * 1e9));
    min_a = std::min(min_a, point.alpha0_rad);
    max_a = std::max(max_a, point.alpha0_rad);
  }
  if (distinct.size() < 8) {
    throw std::invalid_argument("degenerate calibration sweep: need at least 8 distinct settings");
  }
  if (max_a - min_a < two_pi * (1.0 - 1e-6) * 7.0 / 8.0) {
    // A sweep sampled uniformly over one fringe has span (n-1)/n * 2 pi.
    throw std::invalid_argument("calibration sweep must span at least one full fringe");
  }

  CalibrationCurve curve;
  double pooled_num = 0.0;
  double pooled_den = 0.0;
  for (int channel = 0; channel < 4; ++channel) {
    std::vector<SinusoidPoint> points;
    points.reserve(sweep.size());
    for (const auto& sp : sweep) {
      points.push_back({sp.alpha0_rad,
                        static_cast<double>(sp.counts.totals().channel(channel)),
                        sp.counts.total_duration_s()});
    }
    ChannelFit fit = fit_poisson_sinusoid(points);
    if (fit.visibility <= 0.0 || fit.visibility > 1.0 + kContrastClampTolerance) {
      std::ostringstream oss;
      oss << "calibration channel " << channel << " fitted an unphysical visibility "
          << fit.visibility;
      throw FitError(oss.str());
    }
    curve.chi2 += fit.chi2;
    curve.dof += fit.n_points - 3;
    if (fit.se_visibility > 0.0) {
      const double inv_var = 1.0 / (fit.se_visibility * fit.se_visibility);
      pooled_num += fit.visibility * inv_var;
      pooled_den += inv_var;
    }
    curve.channels[channel] = std::move(fit);
  }
  if (pooled_den > 0.0) {
    curve.pooled_visibility = pooled_num / pooled_den;
    curve.se_pooled_visibility = 1.0 / std::sqrt(pooled_den);
  } else {
    // Noiseless inputs fit exactly; all channels agree.
    curve.pooled_visibility = curve.channels[0].visibility;
  }

  // Same-type channels carry phase phi, mixed channels phi + pi.
  for (int same : {0, 3}) {
    for (int mixed : {1, 2}) {
      const double dev = std::abs(
          wrap_angle(curve.channels[same].phase_rad - curve.channels[mixed].phase_rad - pi));
      const double sigma = std::hypot(curve.channels[same].se_phase,
                                      curve.channels[mixed].se_phase);
      if (sigma > 0.0) {
        curve.phase_opposition_sigmas = std::max(curve.phase_opposition_sigmas, dev / sigma);
      } else if (dev > 1e-9) {
        curve.phase_opposition_sigmas = std::numeric_limits<double>::infinity();
      }
    }
  }
  return curve;
}

ThetaEstimate estimate_theta(const BinCounts& totals, double visibility) {
  require_visibility(visibility);
  const std::uint64_t n = totals.total();
  if (n == 0) {
    throw std::invalid_argument("cannot estimate a phase from zero counts");
  }
  const double n_same = static_cast<double>(totals.hh + totals.vv);
  const double n_mixed = static_cast<double>(totals.hv + totals.vh);
  ThetaEstimate est;
  est.n_pairs = n;
  est.contrast_ratio = (n_same - n_mixed) / (visibility * static_cast<double>(n));
  est.visibility_warning = std::abs(est.contrast_ratio) > 1.0 + kContrastClampTolerance;
  est.theta_rad = std::acos(std::clamp(est.contrast_ratio, -1.0, 1.0));
  const double info = fringe_fisher_information(visibility, est.theta_rad);
  est.sigma_rad = info > 0.0 ? 1.0 / std::sqrt(static_cast<double>(n) * info)
                             : std::numeric_limits<double>::infinity();
  return est;
}

ThetaEstimate estimate_theta(const CoincidenceSet& counts, double visibility) {
  counts.validate();
  return estimate_theta(counts.totals(), visibility);
}

double classical_ideal_fi(Parameter parameter) {
  switch (parameter) {
    case Parameter::MeanRotation:
      return 8.0;
    case Parameter::DifferenceRotation:
      return 2.0;
    default:
      throw std::invalid_argument("the classical benchmark covers rotation parameters only");
  }
}

double compare_to_classical_crb(const Estimate& estimate, std::uint64_t n_pairs) {
  if (n_pairs == 0) {
    throw std::invalid_argument("classical CRB comparison needs a positive pair count");
  }
  const double crb_rad =
      1.0 / std::sqrt(static_cast<double>(n_pairs) * classical_ideal_fi(estimate.parameter));
  return estimate.std_error_deg / rad_to_deg(crb_rad);
}

Estimate extract_rotation(const CoincidenceSet& reference, const CoincidenceSet& sample,
                          Scheme scheme, double visibility) {
  if (scheme != Scheme::PhiQuantum && scheme != Scheme::PsiQuantum) {
    throw std::invalid_argument("rotation extraction requires a quantum scheme");
  }
  reference.validate();
  sample.validate();
  if (reference.meta.scheme != scheme || sample.meta.scheme != scheme) {
    throw std::invalid_argument("scheme mismatch between data sets and requested extraction");
  }
  if (std::abs(reference.meta.bias_phase_rad - sample.meta.bias_phase_rad) > 1e-12) {
    throw std::invalid_argument("bias phase differs between reference and sample sets");
  }
  if (std::abs(reference.meta.lambda1_nm - sample.meta.lambda1_nm) > 1e-9 ||
      std::abs(reference.meta.lambda2_nm - sample.meta.lambda2_nm) > 1e-9) {
    throw std::invalid_argument("wavelengths differ between reference and sample sets");
  }

  const bool is_phi = scheme == Scheme::PhiQuantum;
  const double chain = is_phi ? 4.0 : 2.0;
  const ThetaEstimate ref = estimate_theta(reference, visibility);
  const ThetaEstimate sam = estimate_theta(sample, visibility);

  Estimate est;
  est.parameter = is_phi ? Parameter::MeanRotation : Parameter::DifferenceRotation;
  est.scheme = scheme;
  est.theta_ref_rad = ref.theta_rad;
  est.theta_sample_rad = sam.theta_rad;
  const double value_rad =
      (is_phi ? ref.theta_rad - sam.theta_rad : sam.theta_rad - ref.theta_rad) / chain;
  est.value_deg = rad_to_deg(value_rad);
  est.pooled_sigma_deg = rad_to_deg(std::hypot(ref.sigma_rad, sam.sigma_rad) / chain);
  est.n_pairs = sam.n_pairs;
  est.fi_used_per_rad2 =
      chain * chain * fringe_fisher_information(visibility, sam.theta_rad);
  est.crb_sigma_deg =
      est.fi_used_per_rad2 > 0.0
          ? rad_to_deg(1.0 / std::sqrt(static_cast<double>(sam.n_pairs) * est.fi_used_per_rad2))
          : std::numeric_limits<double>::infinity();
  est.sample_label = sample.meta.sample_label;
  est.reference_label = reference.meta.sample_label;

  // Per-bin sample estimates against the pooled reference phase; the common
  // reference offset cancels in the scatter, so the SEM tracks the sample
  // set's own noise, as in per-acquisition angle statistics.
  est.per_bin_values_deg.reserve(sample.bins.size());
  for (const auto& bin : sample.bins) {
    if (bin.total() == 0) continue;
    const ThetaEstimate bin_est = estimate_theta(bin, visibility);
    const double r =
        (is_phi ? ref.theta_rad - bin_est.theta_rad : bin_est.theta_rad - ref.theta_rad) / chain;
    est.per_bin_values_deg.push_back(rad_to_deg(r));
  }
  if (est.per_bin_values_deg.size() >= 2) {
    const double n_bins = static_cast<double>(est.per_bin_values_deg.size());
    double mean = 0.0;
    for (double x : est.per_bin_values_deg) mean += x;
    mean /= n_bins;
    double ss = 0.0;
    for (double x : est.per_bin_values_deg) ss += (x - mean) * (x - mean);
    est.std_error_deg = std::sqrt(ss / (n_bins - 1.0)) / std::sqrt(n_bins);
  } else {
    est.std_error_deg = est.pooled_sigma_deg;
  }
  est.ratio_to_classical_crb = compare_to_classical_crb(est, est.n_pairs);
  return est;
}

}  // namespace qord
