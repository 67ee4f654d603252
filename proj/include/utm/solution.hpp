#pragma once

#include <cmath>
#include <optional>

#include "utm/common.hpp"
#include "utm/contours.hpp"
#include "utm/kernel.hpp"
#include "utm/transforms.hpp"

namespace utm {

struct SolutionSample {
  double x = 0.0, t = 0.0;
  cplx psi{};
  double error = 0.0;
};

struct SolverOptions {
  std::optional<double> R;          // disk radius; default 1.25 sqrt(2 Lambda), at least 0.5
  double tol = 1e-10;               // absolute quadrature target per integral
  double tilt_real = pi / 8;        // lean of the real ray into the first quadrant
  std::optional<double> tilt_imag;  // lean of the imaginary ray into the third quadrant
  bool follow_saddle = true;        // run the imaginary ray down to the stationary point
  std::optional<double> truncation; // fixed ray length instead of the decay-based one
  int max_intervals = 60000;
};

inline double default_R(double Lambda) { return std::max(1.25 * std::sqrt(2.0 * Lambda), 0.5); }

inline double radius(const SolverOptions& o, double Lambda) {
  double R = o.R ? *o.R : default_R(Lambda);
  if (!(R > std::sqrt(2.0 * Lambda)))
    throw DomainError("R too small: need R > sqrt(2*Lambda) with Lambda=" + std::to_string(Lambda));
  return R;
}

// Lean of the imaginary ray.  For Gaussian data the transform and exp(i kappa^2 t) share a
// quadratic exponent whose phase vanishes at half of atan(4t/w^2).
inline double imag_tilt(const SolverOptions& o, const InitialCondition& ic, double t) {
  if (o.tilt_imag) return *o.tilt_imag;
  double w = ic.spectral_width();
  if (w <= 0.0) return pi / 4;
  return 0.5 * std::atan(4.0 * t / (w * w));
}

inline QuadOptions quad_options(const SolverOptions& o) {
  QuadOptions q;
  q.tol = o.tol;
  q.max_intervals = o.max_intervals;
  return q;
}

}  // namespace utm
