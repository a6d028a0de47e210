#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "bellsim/angle.hpp"

namespace bellsim {

/// Probabilities of the four joint +-1 outcomes at one setting pair,
/// in the order (+,+), (+,-), (-,+), (-,-).
struct JointDistribution {
  double p_pp = 0.0;
  double p_pm = 0.0;
  double p_mp = 0.0;
  double p_mm = 0.0;

  double sum() const { return p_pp + p_pm + p_mp + p_mm; }
  double marginal_a_plus() const { return p_pp + p_pm; }
  double marginal_b_plus() const { return p_pp + p_mp; }

  /// Expectation of the product of the two outcomes:
  /// P(equal) - P(opposite).
  double correlation_value() const { return p_pp + p_mm - p_pm - p_mp; }
};

/// Expectation of the product of the two +-1 outcomes, in [-1, +1].
struct Correlation {
  double value = 0.0;
};

/// Malus law at wing A: probability that a photon of polarization theta
/// passes a polarizer set to alpha.
inline double lhv_detect_prob_a(Angle theta, Angle alpha) {
  const double c = std::cos(theta.radians - alpha.radians);
  return c * c;
}

/// Malus law at wing B: the partner photon carries polarization
/// theta + pi/2, so it passes a polarizer at beta with
/// cos^2(theta + pi/2 - beta).
inline double lhv_detect_prob_b(Angle theta, Angle beta) {
  const double c = std::cos(theta.radians + kPi / 2.0 - beta.radians);
  return c * c;
}

/// Joint outcome distribution of the hidden-variable model, averaged over
/// the uniform hidden polarization:
///   p(++) = p(--) = 1/4 - (1/8) cos 2(alpha-beta)
///   p(+-) = p(-+) = 1/4 + (1/8) cos 2(alpha-beta)
inline JointDistribution lhv_joint_distribution(Angle alpha, Angle beta) {
  const double c = std::cos(2.0 * (alpha.radians - beta.radians));
  return JointDistribution{0.25 - 0.125 * c, 0.25 + 0.125 * c,
                           0.25 + 0.125 * c, 0.25 - 0.125 * c};
}

/// Hidden-variable correlation, -(1/2) cos 2(alpha-beta).
inline Correlation lhv_correlation(Angle alpha, Angle beta) {
  return Correlation{-0.5 * std::cos(2.0 * (alpha.radians - beta.radians))};
}

/// Quantum-mechanical reference distribution for the same experiment
/// (photon pair with orthogonal polarizations):
///   p(++) = p(--) = (1/4)(1 - cos 2(alpha-beta))
///   p(+-) = p(-+) = (1/4)(1 + cos 2(alpha-beta))
/// Both marginals are 1/2 and the induced correlation is the full cosine.
inline JointDistribution qm_joint_distribution(Angle alpha, Angle beta) {
  const double c = std::cos(2.0 * (alpha.radians - beta.radians));
  return JointDistribution{0.25 * (1.0 - c), 0.25 * (1.0 + c),
                           0.25 * (1.0 + c), 0.25 * (1.0 - c)};
}

/// Quantum-mechanical correlation, -cos 2(alpha-beta).
inline Correlation qm_correlation(Angle alpha, Angle beta) {
  return Correlation{-std::cos(2.0 * (alpha.radians - beta.radians))};
}

/// Brute-force check value for p(++): composite midpoint-rule integration of
/// the product of the two Malus probabilities over the hidden polarization,
///   (1/pi) * integral_0^pi cos^2(theta - alpha) cos^2(theta + pi/2 - beta).
/// Deliberately avoids the closed form so it can serve as an independent
/// oracle for lhv_joint_distribution. The integrand is smooth and
/// pi-periodic, so the midpoint rule converges spectrally fast.
/// Throws std::domain_error if steps < 2.
inline double quadrature_p_pp(Angle alpha, Angle beta, std::size_t steps) {
  if (steps < 2) {
    throw std::domain_error("quadrature_p_pp: steps must be >= 2");
  }
  const double h = kPi / static_cast<double>(steps);
  double acc = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const Angle theta{(static_cast<double>(i) + 0.5) * h};
    acc += lhv_detect_prob_a(theta, alpha) * lhv_detect_prob_b(theta, beta);
  }
  // (1/pi) * h * sum = sum / steps
  return acc / static_cast<double>(steps);
}

}  // namespace bellsim
