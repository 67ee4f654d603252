#pragma once

// Finite well or barrier: levels (0, alpha, 0) with interfaces at 0 and x2.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "utm/general.hpp"
#include "utm/step.hpp"

namespace utm {

struct WellProblem {
  double alpha = 0.0;
  double x2 = 1.0;
  InitialCondition psi0;
  Representation representation = Representation::Quadrant;

  PiecewisePotential potential() const {
    if (!(x2 > 0.0)) throw ConfigError("potential.interfaces", "well width must be positive");
    return PiecewisePotential::well(alpha, x2);
  }
};

// 4 i pi ((alpha + 2 kappa^2) sin(x2 nu) + 2 kappa nu cos(x2 nu)) for a given nu = nu^(2)
inline cplx well_delta(double alpha, double x2, cplx kappa, cplx v) {
  return 4.0 * I * pi * ((alpha + 2.0 * kappa * kappa) * std::sin(x2 * v) + 2.0 * kappa * v * std::cos(x2 * v));
}

inline cplx well_delta(double alpha, double x2, cplx kappa) {
  return well_delta(alpha, x2, kappa, nu(alpha, kappa));
}

namespace detail {

// exp(i x2 nu) Delta, bounded where Delta grows like exp(kappa x2)
inline cplx well_delta_scaled(double alpha, double L, cplx kappa, cplx v) {
  cplx e2 = std::exp(2.0 * I * L * v);
  return 2.0 * pi * (alpha + 2.0 * kappa * kappa) * (e2 - 1.0) + 4.0 * I * pi * kappa * v * (e2 + 1.0);
}

// Regional correction integrand in kappa (without exp(i kappa^2 t)), given the branch value
// v = nu^(2) and the four data transforms P1 = psi1(i kappa), P2 = psi2(v), Q2 = psi2(-v),
// Q3 = psi3(-i kappa).  Family 0: x < 0; 1: 0 < x < x2 left-moving; 2: 0 < x < x2
// right-moving; 3: x > x2.  order 1 gives the x-derivative.
struct WellTerms {
  double alpha, L;
  cplx operator()(int family, cplx k, cplx v, cplx P1, cplx P2, cplx Q2, cplx Q3, double x, int order) const {
    cplx D = well_delta_scaled(alpha, L, k, v);
    cplx e2 = std::exp(2.0 * I * L * v);
    cplx eL = std::exp(L * k + I * L * v);
    cplx kk = k * k + v * v;
    cplx s;
    switch (family) {
      case 0: {
        cplx ex = std::exp(k * x);
        s = (I * kk * (e2 - 1.0) * P1 + 2.0 * k * (I * k - v) * e2 * P2 - 2.0 * k * (I * k + v) * Q2 -
             4.0 * k * v * eL * Q3) * ex;
        if (order) s *= k;
        break;
      }
      case 3: {
        cplx ex = std::exp(-k * x + L * k + I * L * v);
        s = (-4.0 * k * v * P1 - 2.0 * k * (I * k + v) * P2 + 2.0 * k * (I * k - v) * Q2) * ex +
            I * kk * (e2 - 1.0) * std::exp(k * (2.0 * L - x)) * Q3;
        if (order) s *= -k;
        break;
      }
      case 1: {
        cplx ex = std::exp(I * v * (2.0 * L - x));
        s = (2.0 * k * (I * k - v) * P1 - k * kk / v * P2 + k * (k + I * v) * (k + I * v) / v * Q2) * ex -
            2.0 * k * (I * k + v) * std::exp(-I * v * x + L * k + I * L * v) * Q3;
        if (order) s *= -I * v;
        break;
      }
      default: {
        cplx ex = std::exp(I * v * x);
        s = (-2.0 * k * (I * k + v) * P1 + k * (k + I * v) * (k + I * v) / v * std::exp(2.0 * I * L * v) * P2 -
             k * kk / v * Q2 + 2.0 * k * (I * k - v) * eL * Q3) * ex;
        if (order) s *= I * v;
        break;
      }
    }
    return s / D;
  }
};

}  // namespace detail

// Closed-form well/barrier solver.  D4 integrates the kappa-form on the fourth-quadrant
// contour; Quadrant substitutes kappa = i k, -i k (outer regions) or kappa = +-i k s(k),
// s = sqrt(1 + alpha/k^2), with nu^(2) = -+k (inner region) and runs on the rotated paths.
class WellSolver {
 public:
  explicit WellSolver(WellProblem P, SolverOptions opt = {})
      : P_(P), G_(P.potential(), P.psi0, opt), opt_(opt), terms_{P.alpha, P.x2} {}

  const GeneralSolver& general() const { return G_; }
  const WellProblem& problem() const { return P_; }

  SolutionSample evaluate(double x, double t, int order = 0) const {
    if (t < 0.0) throw DomainError("t must be non-negative");
    const auto& ic = P_.psi0;
    if (t == 0.0) return {x, t, order ? ic.derivative(x) : ic.value(x), 0.0};
    if (x == 0.0 || x == P_.x2) {
      int j = x == 0.0 ? 1 : 2;
      SolutionSample l = evaluate_side(j, x, t, order), r = evaluate_side(j + 1, x, t, order);
      return {x, t, 0.5 * (l.psi + r.psi), 0.5 * std::abs(l.psi - r.psi) + std::max(l.error, r.error)};
    }
    return evaluate_side(x < 0.0 ? 1 : (x < P_.x2 ? 2 : 3), x, t, order);
  }

  SolutionSample evaluate_side(int region, double x, double t, int order = 0) const {
    const Transformer& T = G_.transformer();
    IntegralResult tot = order ? T.free_term_dx(region, x, t, opt_.tol) : T.free_term(region, x, t, opt_.tol);
    double R = G_.radius();
    for (int attempt = 0;; ++attempt) {
      try {
        IntegralResult c;
        if (region == 1) c = family(0, x, t, order, R);
        if (region == 3) c = family(3, x, t, order, R);
        if (region == 2) {
          c = family(1, x, t, order, R);
          c += family(2, x, t, order, R);
        }
        tot += c;
        return {x, t, tot.value, tot.error};
      } catch (const SingularSystemError&) {
        if (attempt >= 4) throw;
        R *= 1.5;
      }
    }
  }

  // kappa-form integrand, exp(i kappa^2 t) included
  cplx d4_integrand(int fam, cplx k, double x, double t, int order = 0) const {
    const Transformer& T = G_.transformer();
    cplx v = nu(P_.alpha, k);
    cplx f = terms_(fam, k, v, T(1, I * k), T(2, v), T(2, -v), T(3, -I * k), x, order);
    return f * std::exp(I * k * k * t);
  }

  // quadrant-form integrand in k, including the Jacobian of the substitution
  cplx quadrant_integrand(int fam, cplx k, double x, double t, int order = 0) const {
    const Transformer& T = G_.transformer();
    const double a = P_.alpha;
    cplx kap, v, jac;
    switch (fam) {
      case 0:
        kap = I * k, v = -k * root_factor(-a, k), jac = I;
        break;
      case 3:
        kap = -I * k, v = k * root_factor(-a, k), jac = -I;
        break;
      case 1: {
        cplx s = root_factor(a, k);
        kap = I * k * s, v = -k, jac = I / s;
        break;
      }
      default: {
        cplx s = root_factor(a, k);
        kap = -I * k * s, v = k, jac = -I / s;
        break;
      }
    }
    cplx f = terms_(fam, kap, v, T(1, I * kap), T(2, v), T(2, -v), T(3, -I * kap), x, order);
    return f * std::exp(I * kap * kap * t) * jac;
  }

 private:
  IntegralResult family(int fam, double x, double t, int order, double R) const {
    double xref = (fam == 0 || fam == 2) ? 0.0 : P_.x2;
    Geometry g;
    g.R = R;
    g.tilt_real = opt_.tilt_real;
    g.tilt_imag = imag_tilt(opt_, P_.psi0, t);
    g.depth = opt_.follow_saddle ? std::abs(x - xref) / (2.0 * t) : 0.0;
    g.truncation = opt_.truncation.value_or(0.0);
    auto q = quad_options(opt_);
    auto fkap = [&](cplx k) { return d4_integrand(fam, k, x, t, order); };
    if (P_.representation == Representation::D4) return integrate(G_.guarded_path(g, fkap), fkap, q);
    if (P_.representation == Representation::RealLine)
      throw RepresentationError("real-line form is not available for the well");
    // outer region 1 and family 1 live on the third quadrant, the others on the first
    cplx rot = (fam == 0 || fam == 1) ? -I : I;
    auto fk = [&](cplx k) { return quadrant_integrand(fam, k, x, t, order); };
    auto fk_on_kappa = [&](cplx kap) { return fk(rot * kap) * rot; };
    ContourPath kp = G_.guarded_path(g, fk_on_kappa);
    return integrate(kp.rotated(rot), fk, q);
  }

  WellProblem P_;
  GeneralSolver G_;
  SolverOptions opt_;
  detail::WellTerms terms_;
};

inline SolutionSample evaluate_well(const WellProblem& P, double x, double t, const SolverOptions& opt = {},
                                    int order = 0) {
  return WellSolver(P, opt).evaluate(x, t, order);
}

struct ScatteringCoefficient {
  cplx xi{};
  cplx a_value{};
};

// a(xi) = e^{i xi x2} (cosh(x2 q) - i (2 xi^2 - alpha)/(2 xi q) sinh(x2 q)),  q = sqrt(alpha - xi^2)
inline ScatteringCoefficient scattering_a(double alpha, double x2, cplx xi) {
  if (xi == 0.0) throw DomainError("a(xi) has a pole at xi = 0");
  cplx q = std::sqrt(alpha - xi * xi);
  cplx z = x2 * q;
  cplx shc = std::abs(z) < 1e-3 ? 1.0 + z * z / 6.0 + z * z * z * z / 120.0 : std::sinh(z) / z;
  cplx a = std::exp(I * xi * x2) * (std::cosh(z) - I * (2.0 * xi * xi - alpha) / (2.0 * xi) * x2 * shc);
  return {xi, a};
}

namespace detail {

// sign-change brackets on a uniform grid followed by bisection
template <class F>
std::vector<double> real_roots(F&& f, double lo, double hi, int grid = 1000, double tol = 1e-12) {
  std::vector<double> roots;
  double h = (hi - lo) / grid;
  double xa = lo + 0.5 * h * 1e-6, fa = f(xa);
  for (int i = 1; i <= grid; ++i) {
    double xb = i == grid ? hi - 0.5 * h * 1e-6 : lo + i * h, fb = f(xb);
    if (fa == 0.0) roots.push_back(xa);
    else if (fa * fb < 0.0) {
      double a = xa, b = xb, fl = fa;
      while (b - a > tol) {
        double m = 0.5 * (a + b), fm = f(m);
        if ((fm < 0.0) == (fl < 0.0)) a = m, fl = fm;
        else b = m;
      }
      roots.push_back(0.5 * (a + b));
    }
    xa = xb, fa = fb;
  }
  return roots;
}

}  // namespace detail

// Bound states: xi = i eta with 0 < eta < sqrt(-alpha).  e^{eta x2} a(i eta) is real there.
inline std::vector<double> scattering_zeros(double alpha, double x2) {
  if (alpha >= 0.0) return {};
  auto g = [&](double eta) { return (scattering_a(alpha, x2, I * eta).a_value * std::exp(eta * x2)).real(); };
  return detail::real_roots(g, 0.0, std::sqrt(-alpha));
}

// Delta on the real kappa axis inside the cut, nu^(2) = -sqrt(-alpha - kappa^2); real up to -i.
inline double delta_on_cut(double alpha, double x2, double kappa) {
  cplx v = -std::sqrt(std::max(-alpha - kappa * kappa, 0.0));
  return (I * well_delta(alpha, x2, kappa, v)).real();
}

struct EigenPair {
  cplx xi_root{};
  cplx kappa_root{};
  double residual = 0.0;  // |Delta| at the kappa predicted by the xi root
  bool matched = false;
};

// Outer regions have alpha_j = 0, so i xi^2 = omega(k) gives k = xi and kappa = -i k = eta.
inline std::vector<EigenPair> eigenvalue_correspondence(double alpha, double x2) {
  std::vector<EigenPair> out;
  if (alpha >= 0.0) return out;
  std::vector<double> xs = scattering_zeros(alpha, x2);
  std::vector<double> ks = detail::real_roots([&](double k) { return delta_on_cut(alpha, x2, k); }, 0.0,
                                              std::sqrt(-alpha));
  for (double eta : xs) {
    EigenPair p;
    p.xi_root = I * eta;
    p.residual = std::abs(delta_on_cut(alpha, x2, eta));
    auto it = std::min_element(ks.begin(), ks.end(),
                               [&](double a, double b) { return std::abs(a - eta) < std::abs(b - eta); });
    if (it != ks.end() && std::abs(*it - eta) < 1e-8) {
      p.kappa_root = *it;
      p.matched = true;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace utm
