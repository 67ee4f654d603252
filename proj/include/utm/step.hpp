#pragma once

// Single potential jump at x = 0: levels alpha1 (x < 0) and alpha2 (x > 0).

#include <cmath>

#include "utm/contours.hpp"
#include "utm/kernel.hpp"
#include "utm/solution.hpp"
#include "utm/transforms.hpp"

namespace utm {

enum class Representation { D4, Quadrant, RealLine };

inline const char* to_string(Representation r) {
  switch (r) {
    case Representation::D4: return "d4";
    case Representation::Quadrant: return "quadrant";
    case Representation::RealLine: return "realline";
  }
  return "?";
}

struct StepProblem {
  double alpha1 = 0.0, alpha2 = 0.0;
  InitialCondition psi0;
  Representation representation = Representation::Quadrant;

  PiecewisePotential potential() const { return PiecewisePotential::step(alpha1, alpha2); }
};

// Coefficients of the transformed step formulas at spectral point k.
//   region 1:  a1 = r1 psi1(-k) + tau1 psi2(k s1),  s1 = sqrt(1 + (alpha1-alpha2)/k^2)
//   region 2:  a2 = r2 psi2(-k) + tau2 psi1(k s2),  s2 = sqrt(1 + (alpha2-alpha1)/k^2)
struct StepCoefficients {
  cplx s1, r1, tau1;
  cplx s2, r2, tau2;
};

// sqrt(1 + a/k^2), principal branch, with one-sided limits on the cut
inline cplx root_factor(double a, cplx k, Side side = Side::None) {
  if (a == 0.0) return 1.0;
  if (k == 0.0) throw CutError(k);
  if (a < 0.0 && k.imag() == 0.0 && std::abs(k.real()) <= std::sqrt(-a)) {
    double m = std::sqrt(std::max(-a / (k.real() * k.real()) - 1.0, 0.0));
    double sg = k.real() > 0 ? 1.0 : -1.0;
    if (side == Side::Below) return -I * sg * m;
    if (side == Side::Above) return I * sg * m;
    throw CutError(k);
  }
  if (a > 0.0 && k.real() == 0.0 && std::abs(k.imag()) <= std::sqrt(a)) {
    double m = std::sqrt(std::max(a / (k.imag() * k.imag()) - 1.0, 0.0));
    double sg = k.imag() > 0 ? 1.0 : -1.0;
    if (side == Side::Left) return I * sg * m;
    if (side == Side::Right) return -I * sg * m;
    throw CutError(k);
  }
  return std::sqrt(1.0 + a / (k * k));
}

inline StepCoefficients step_coefficients(double alpha1, double alpha2, cplx k, Side side = Side::None) {
  StepCoefficients c;
  c.s1 = root_factor(alpha1 - alpha2, k, side);
  c.r1 = (1.0 - c.s1) / (1.0 + c.s1);
  c.tau1 = 2.0 / (1.0 + c.s1);
  c.s2 = root_factor(alpha2 - alpha1, k, side);
  c.r2 = (1.0 - c.s2) / (1.0 + c.s2);
  c.tau2 = 2.0 / (1.0 + c.s2);
  return c;
}

namespace detail {

struct StepEval {
  const StepProblem& P;
  const Transformer& T;
  double x, t;
  SolverOptions opt;
  int order = 0;  // 0 for psi, 1 for psi_x

  cplx dfac(cplx m) const { return order ? m : cplx(1.0); }

  double a1() const { return P.alpha1; }
  double a2() const { return P.alpha2; }

  Geometry geometry(double xref) const {
    Geometry g;
    g.R = radius(opt, std::max(std::abs(a1()), std::abs(a2())));
    g.tilt_real = opt.tilt_real;
    g.tilt_imag = imag_tilt(opt, P.psi0, t);
    g.depth = opt.follow_saddle ? std::abs(x - xref) / (2.0 * t) : 0.0;
    g.truncation = opt.truncation.value_or(0.0);
    return g;
  }

  // correction integrand on the fourth-quadrant contour
  cplx d4(cplx k, int region) const {
    cplx n1 = nu(a1(), k), n2 = nu(a2(), k);
    cplx e = std::exp(I * k * k * t);
    cplx p1 = T(1, n1), p2 = T(2, -n2);
    if (region == 1)
      return (-k * (n1 - n2) / (2.0 * pi * n1 * (n1 + n2)) * p1 - k / (pi * (n1 + n2)) * p2) *
             std::exp(-I * n1 * x) * e * dfac(-I * n1);
    return (-k / (pi * (n1 + n2)) * p1 + k * (n1 - n2) / (2.0 * pi * n2 * (n1 + n2)) * p2) *
           std::exp(I * n2 * x) * e * dfac(I * n2);
  }

  // quadrant-form integrand in k, sign of the region included
  cplx quadrant(cplx k, int region, Side side = Side::None) const {
    if (region == 1) {
      cplx s1 = root_factor(a1() - a2(), k, side);
      cplx a = ((1.0 - s1) * T(1, -k) + 2.0 * T(2, k * s1)) / (1.0 + s1);
      return a / (2.0 * pi) * std::exp(I * k * x - omega(a1(), k) * t) * dfac(I * k);
    }
    cplx s2 = root_factor(a2() - a1(), k, side);
    cplx a = ((1.0 - s2) * T(2, -k) + 2.0 * T(1, k * s2)) / (1.0 + s2);
    return a / (2.0 * pi) * std::exp(I * k * x - omega(a2(), k) * t) * dfac(I * k);
  }

  IntegralResult correction(int region) const {
    auto q = quad_options(opt);
    switch (P.representation) {
      case Representation::D4: {
        auto f = [&](cplx k) { return d4(k, region); };
        ContourPath path = d4_path_for(geometry(0.0), f, opt.tol);
        return integrate(path, f, q);
      }
      case Representation::Quadrant: {
        // kappa = i k for region 1 (third quadrant), kappa = -i k for region 2 (first quadrant)
        cplx rot = region == 1 ? -I : I;
        double sgn = region == 1 ? -1.0 : 1.0;
        auto fk = [&](cplx k) { return sgn * quadrant(k, region); };
        auto fkappa = [&](cplx kap) { return fk(rot * kap) * rot; };
        ContourPath kp = d4_path_for(geometry(0.0), fkappa, opt.tol);
        return integrate(kp.rotated(rot), fk, q);
      }
      case Representation::RealLine: return realline(region);
    }
    return {};
  }

  IntegralResult realline(int region) const {
    if (!(a2() > a1())) throw RepresentationError("real-line form needs alpha2 > alpha1");
    double a = a2() - a1(), sa = std::sqrt(a);
    double k0 = x / (2.0 * t);
    double T0 = std::max({std::abs(k0), sa, 1.0}) + 2.0;
    double th = imag_tilt(opt, P.psi0, t);
    auto f = [&](cplx k, Side s) { return quadrant(k, region, s); };
    ContourPath path;
    cplx dl = -std::exp(-I * th), dr = std::exp(-I * th);
    auto fl = [&](cplx k) { return f(k, Side::None); };
    double Ll = ray_extent(fl, cplx(-T0), dl, opt.tol, 1.0);
    double Lr = ray_extent(fl, cplx(T0), dr, opt.tol, 1.0);
    Leg left = Leg::segment(-T0 + Ll * dl, -T0);
    left.tail = Leg::Tail::AtStart;
    path.legs.push_back(left);
    if (region == 1) {
      path.legs.push_back(Leg::segment(-T0, -sa, Side::Below));
      path.legs.push_back(Leg::segment(-sa, 0.0, Side::Below));
      path.legs.push_back(Leg::segment(0.0, sa, Side::Below));
      path.legs.push_back(Leg::segment(sa, T0, Side::Below));
    } else {
      path.legs.push_back(Leg::segment(-T0, 0.0));
      path.legs.push_back(Leg::segment(0.0, T0));
    }
    Leg right = Leg::segment(T0, T0 + Lr * dr);
    right.tail = Leg::Tail::AtEnd;
    path.legs.push_back(right);
    if (region == 2) {
      path.legs.push_back(Leg::segment(0.0, I * sa, Side::Left));
      path.legs.push_back(Leg::segment(I * sa, 0.0, Side::Right));
    }
    path.truncation_radius = std::max(std::abs(left.a), std::abs(right.b));
    return integrate(path, f, quad_options(opt));
  }

  SolutionSample one_sided(int region) const {
    IntegralResult fr = order ? T.free_term_dx(region, x, t, opt.tol) : T.free_term(region, x, t, opt.tol);
    IntegralResult c = correction(region);
    return {x, t, fr.value + c.value, fr.error + c.error};
  }
};

}  // namespace detail

inline SolutionSample evaluate_step(const StepProblem& P, const Transformer& T, double x, double t,
                                    const SolverOptions& opt = {}, int order = 0) {
  if (t < 0.0) throw DomainError("t must be non-negative");
  if (t == 0.0) return {x, t, order ? P.psi0.derivative(x) : P.psi0.value(x), 0.0};
  detail::StepEval ev{P, T, x, t, opt, order};
  if (x < 0.0) return ev.one_sided(1);
  if (x > 0.0) return ev.one_sided(2);
  SolutionSample l = ev.one_sided(1), r = ev.one_sided(2);
  return {x, t, 0.5 * (l.psi + r.psi), 0.5 * std::abs(l.psi - r.psi) + std::max(l.error, r.error)};
}

inline SolutionSample evaluate_step(const StepProblem& P, double x, double t, const SolverOptions& opt = {},
                                    int order = 0) {
  Transformer T(P.potential(), P.psi0);
  return evaluate_step(P, T, x, t, opt, order);
}

// one-sided limits at the interface, used by the continuity checks
inline SolutionSample evaluate_step_side(const StepProblem& P, const Transformer& T, int region, double x,
                                         double t, const SolverOptions& opt = {}, int order = 0) {
  detail::StepEval ev{P, T, x, t, opt, order};
  return ev.one_sided(region);
}

}  // namespace utm
