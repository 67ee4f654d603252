#pragma once

// Stationary-phase leading order of the step solution along rays x/t = gamma.

#include <cmath>
#include <limits>

#include "utm/step.hpp"

namespace utm {

struct RaySpec {
  double gamma = 0.0;  // negative for region 1, positive for region 2
  double t_min = 0.0, t_max = std::numeric_limits<double>::infinity();

  int region() const {
    if (gamma < 0.0) return 1;
    if (gamma > 0.0) return 2;
    throw DomainError("ray slope must be nonzero");
  }
};

// Radicand 1 + 4(alpha_j' - alpha_j)/gamma^2 of the transmitted argument for the ray's region.
inline double ray_radicand(double alpha1, double alpha2, const RaySpec& ray) {
  double d = ray.region() == 1 ? alpha1 - alpha2 : alpha2 - alpha1;
  return 1.0 + 4.0 * d / (ray.gamma * ray.gamma);
}

// e^{i(gamma^2/4 - alpha_j)t - i pi/4} / (2 sqrt(pi t)) times
//   psi_j(gamma/2) + [(1-s) psi_j(-gamma/2) + 2 psi_j'(s gamma/2)] / (1+s)
// where j is the ray's region and j' the other one.
inline cplx leading_order_step(double alpha1, double alpha2, const Transformer& T, const RaySpec& ray, double t) {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  int j = ray.region(), o = 3 - j;
  double r = ray_radicand(alpha1, alpha2, ray);
  if (!(r > 0.0)) throw DomainError("ray inside forbidden cone: gamma=" + std::to_string(ray.gamma));
  double s = std::sqrt(r), g = ray.gamma, al = j == 1 ? alpha1 : alpha2;
  cplx bracket = T(j, g / 2) + ((1.0 - s) * T(j, -g / 2) + 2.0 * T(o, s * g / 2)) / (1.0 + s);
  cplx phase = std::exp(I * ((g * g / 4.0 - al) * t - pi / 4.0));
  return phase / (2.0 * std::sqrt(pi * t)) * bracket;
}

inline cplx leading_order_step(double alpha1, double alpha2, const InitialCondition& ic, const RaySpec& ray,
                               double t) {
  Transformer T(PiecewisePotential::step(alpha1, alpha2), ic);
  return leading_order_step(alpha1, alpha2, T, ray, t);
}

}  // namespace utm
