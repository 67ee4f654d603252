#pragma once

// Reference solutions: Crank-Nicolson on a truncated domain and the free Gaussian.

#include <cmath>
#include <functional>
#include <vector>

#include "utm/kernel.hpp"
#include "utm/transforms.hpp"

namespace utm {

// Evolution of exp(-((x-c)/w)^2) under i psi_t = -psi_xx.
inline cplx free_gaussian(double x, double t, double center = 0.0, double width = 1.0) {
  if (!(width > 0.0)) throw DomainError("width must be positive");
  cplx d = width * width + 4.0 * I * t;
  double y = x - center;
  return std::sqrt(width * width / d) * std::exp(-y * y / d);
}

// Uniform grid on [-L, L] with homogeneous Dirichlet ends.
struct FDGrid {
  double L = 10.0;
  int nx = 2001;
  double dt = 1e-3;

  double h() const { return 2.0 * L / (nx - 1); }
  double x(int i) const { return -L + i * h(); }

  // grid with spacing at most h_max whose nodes include every interface
  static FDGrid aligned(const PiecewisePotential& V, double L, double h_max, double dt) {
    double h = h_max;
    for (double xi : V.interfaces)
      if (xi != 0.0) h = std::min(h, std::abs(xi) / std::ceil(std::abs(xi) / h_max));
    for (double xi : V.interfaces) {
      double m = xi / h;
      if (std::abs(m - std::round(m)) > 1e-9)
        throw ConfigError("potential.interfaces", "interfaces are not commensurate with the grid");
    }
    int half = static_cast<int>(std::ceil(L / h));
    return {half * h, 2 * half + 1, dt};
  }
};

struct FDField {
  double t = 0.0;
  std::vector<double> x;
  std::vector<cplx> psi;
  double mass0 = 0.0, mass = 0.0;

  // four-point Lagrange interpolation
  cplx at(double xq) const {
    double h = x[1] - x[0];
    double u = (xq - x.front()) / h;
    int i = static_cast<int>(std::floor(u));
    if (i < 1 || i + 2 >= static_cast<int>(x.size())) throw DomainError("sample point outside the grid");
    double s = u - i;
    double w[4] = {-s * (s - 1) * (s - 2) / 6, (s + 1) * (s - 1) * (s - 2) / 2, -(s + 1) * s * (s - 2) / 2,
                   (s + 1) * s * (s - 1) / 6};
    cplx v = 0.0;
    for (int k = 0; k < 4; ++k) v += w[k] * psi[i - 1 + k];
    return v;
  }
};

class CrankNicolson {
 public:
  CrankNicolson(const PiecewisePotential& V, const InitialCondition& ic, FDGrid g) : g_(g) {
    if (g.nx < 5 || !(g.L > 0.0) || !(g.dt > 0.0)) throw ConfigError("grid", "invalid finite-difference grid");
    const int n = g.nx;
    const double h = g.h();
    f_.t = 0.0;
    f_.x.resize(n);
    f_.psi.resize(n);
    pot_.resize(n);
    for (int i = 0; i < n; ++i) {
      double xi = g.x(i);
      f_.x[i] = xi;
      pot_[i] = cell_average(V, xi - 0.5 * h, xi + 0.5 * h);
      f_.psi[i] = (i == 0 || i == n - 1) ? cplx(0.0) : ic.value(xi);
    }
    double edge = std::max(std::abs(ic.value(-g.L)), std::abs(ic.value(g.L)));
    if (edge > 1e-12) throw DomainError("domain too small: initial data is not negligible at the walls");
    f_.mass0 = f_.mass = mass();
    // (1 + i dt/2 H) u^{m+1} = (1 - i dt/2 H) u^m with H = -D2 + V
    const int m = n - 2;
    lo_.assign(m, 0.0), di_.assign(m, 0.0), up_.assign(m, 0.0);
    const cplx c = I * (0.5 * g.dt);
    for (int k = 0; k < m; ++k) {
      di_[k] = 1.0 + c * (2.0 / (h * h) + pot_[k + 1]);
      lo_[k] = up_[k] = c * (-1.0 / (h * h));
    }
  }

  const FDField& field() const { return f_; }
  const FDGrid& grid() const { return g_; }

  double mass() const {
    double s = 0.0;
    for (const cplx& v : f_.psi) s += std::norm(v);
    return s * g_.h();
  }

  // mass within the outer 5% of the domain on either side
  double edge_mass() const {
    int band = std::max(2, g_.nx / 20);
    double s = 0.0;
    for (int i = 0; i < band; ++i) s += std::norm(f_.psi[i]) + std::norm(f_.psi[g_.nx - 1 - i]);
    return s * g_.h();
  }

  void step() {
    const int n = g_.nx, m = n - 2;
    const double h = g_.h();
    const cplx c = I * (0.5 * g_.dt);
    std::vector<cplx> r(m);
    for (int k = 0; k < m; ++k) {
      int i = k + 1;
      cplx Hu = (2.0 * f_.psi[i] - f_.psi[i - 1] - f_.psi[i + 1]) / (h * h) + pot_[i] * f_.psi[i];
      r[k] = f_.psi[i] - c * Hu;
    }
    // Thomas algorithm
    std::vector<cplx> cp(m), dp(m);
    cp[0] = up_[0] / di_[0];
    dp[0] = r[0] / di_[0];
    for (int k = 1; k < m; ++k) {
      cplx den = di_[k] - lo_[k] * cp[k - 1];
      cp[k] = up_[k] / den;
      dp[k] = (r[k] - lo_[k] * dp[k - 1]) / den;
    }
    f_.psi[m] = dp[m - 1];
    for (int k = m - 2; k >= 0; --k) f_.psi[k + 1] = dp[k] - cp[k] * f_.psi[k + 2];
    f_.t += g_.dt;
  }

  // advance to t_final, invoking obs after every step; fails if mass reaches the walls
  void run(double t_final, const std::function<void(const FDField&)>& obs = {}) {
    int steps = static_cast<int>(std::llround((t_final - f_.t) / g_.dt));
    for (int s = 0; s < steps; ++s) {
      step();
      if (obs) obs(f_);
    }
    f_.mass = mass();
    if (edge_mass() > 1e-6 * std::max(f_.mass0, 1e-300))
      throw DomainError("domain too small: mass leakage toward the walls exceeds 1e-6");
  }

 private:
  static double cell_average(const PiecewisePotential& V, double a, double b) {
    double s = 0.0;
    for (int j = 1; j <= V.n() + 1; ++j) {
      double lo = std::max(a, V.left_end(j)), hi = std::min(b, V.right_end(j));
      if (hi > lo) s += (hi - lo) * V.level(j);
    }
    return s / (b - a);
  }

  FDGrid g_;
  FDField f_;
  std::vector<double> pot_;
  std::vector<cplx> lo_, di_, up_;
};

inline FDField crank_nicolson_evolve(const PiecewisePotential& V, const InitialCondition& ic, const FDGrid& g,
                                     double t_final) {
  CrankNicolson cn(V, ic, g);
  cn.run(t_final);
  return cn.field();
}

}  // namespace utm
