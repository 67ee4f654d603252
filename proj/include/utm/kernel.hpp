#pragma once

// Piecewise-constant potential and the branch-aware spectral kernels.

#include <algorithm>
#include <cmath>
#include <vector>

#include "utm/common.hpp"

namespace utm {

struct PiecewisePotential {
  std::vector<double> levels;      // alpha_1 .. alpha_{n+1}
  std::vector<double> interfaces;  // x_1 = 0 < x_2 < ... < x_n
  double Lambda = 0.0;

  PiecewisePotential() = default;
  PiecewisePotential(std::vector<double> lv, std::vector<double> xs)
      : levels(std::move(lv)), interfaces(std::move(xs)) {
    if (levels.empty()) throw ConfigError("potential.levels", "no levels given");
    if (levels.size() != interfaces.size() + 1)
      throw ConfigError("potential.interfaces", "need exactly one interface fewer than levels");
    if (!interfaces.empty() && interfaces.front() != 0.0)
      throw ConfigError("potential.interfaces", "first interface must sit at x=0");
    for (size_t j = 1; j < interfaces.size(); ++j)
      if (!(interfaces[j] > interfaces[j - 1]))
        throw ConfigError("potential.interfaces", "interfaces must be strictly increasing");
    for (double a : levels)
      if (!std::isfinite(a)) throw ConfigError("potential.levels", "non-finite level");
    Lambda = 0.0;
    for (double a : levels) Lambda = std::max(Lambda, std::abs(a));
  }

  static PiecewisePotential step(double a1, double a2) { return {{a1, a2}, {0.0}}; }
  static PiecewisePotential well(double alpha, double x2) { return {{0.0, alpha, 0.0}, {0.0, x2}}; }

  int n() const { return static_cast<int>(interfaces.size()); }

  // 1-based region index containing x; points on an interface go to the right
  int region_of(double x) const {
    int j = 1;
    for (double xi : interfaces)
      if (x >= xi) ++j;
    return j;
  }
  double left_end(int j) const {
    return j == 1 ? -std::numeric_limits<double>::infinity() : interfaces[j - 2];
  }
  double right_end(int j) const {
    return j == n() + 1 ? std::numeric_limits<double>::infinity() : interfaces[j - 1];
  }
  double level(int j) const { return levels[j - 1]; }
};

inline bool on_cut(double alpha, cplx kappa) {
  if (alpha > 0.0) return kappa.real() == 0.0 && std::abs(kappa.imag()) <= std::sqrt(alpha);
  if (alpha < 0.0) return kappa.imag() == 0.0 && std::abs(kappa.real()) <= std::sqrt(-alpha);
  return false;
}

// nu(kappa) = i kappa sqrt(1 + alpha/kappa^2), principal branch.
// The value is formed from sqrt(kappa^2 + alpha), which stays finite at small kappa,
// with the sign fixed by the large-kappa expression.
inline cplx nu(double alpha, cplx kappa) {
  if (alpha == 0.0) return I * kappa;
  if (on_cut(alpha, kappa)) throw CutError(kappa);
  cplx r = I * std::sqrt(kappa * kappa + alpha);
  if (std::abs(kappa) > 1e-100 * std::sqrt(std::abs(alpha))) {
    cplx ref = I * kappa * std::sqrt(1.0 + alpha / (kappa * kappa));
    return std::abs(r - ref) <= std::abs(r + ref) ? r : -r;
  }
  double ang = std::arg(kappa);
  bool right = ang > -pi / 2 && ang <= pi / 2;
  return right ? r : -r;
}

inline cplx omega(double alpha, cplx k) { return I * (alpha + k * k); }

inline int sign_of_re_minus_i_nu(double alpha, cplx kappa) {
  bool bad = kappa.real() == 0.0 ||
             (alpha < 0.0 && kappa.imag() == 0.0 && std::abs(kappa.real()) < std::sqrt(-alpha));
  if (bad) throw DomainError("indeterminate sign at kappa=" + fmt_c(kappa));
  double re = (-I * nu(alpha, kappa)).real();
  if (re == 0.0) throw DomainError("indeterminate sign at kappa=" + fmt_c(kappa));
  return re > 0 ? 1 : -1;
}

}  // namespace utm
