#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellsim {

inline constexpr double kPi = std::numbers::pi;

/// Orientation on the polarization half-circle, in radians.
///
/// Everything in the model is periodic in pi, so any finite value is a valid
/// representative; normalize_angle picks the canonical one in [0, pi).
struct Angle {
  double radians = 0.0;
};

/// Reduces a finite angle modulo pi into [0, pi). Idempotent.
/// Throws std::domain_error for non-finite input.
inline Angle normalize_angle(double radians) {
  if (!std::isfinite(radians)) {
    throw std::domain_error("normalize_angle: angle must be finite");
  }
  double r = std::fmod(radians, kPi);
  if (r < 0.0) {
    r += kPi;
  }
  // Adding pi to a tiny negative remainder can round up to pi itself;
  // the interval is half-open, so fold that case back to 0.
  if (r >= kPi) {
    r = 0.0;
  }
  return Angle{r};
}

inline double degrees_to_radians(double degrees) {
  return degrees * (kPi / 180.0);
}

}  // namespace bellsim
