#pragma once

// Potentials with n jumps: the 2n x 2n interface system and the regional solution integrals.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "utm/contours.hpp"
#include "utm/kernel.hpp"
#include "utm/solution.hpp"
#include "utm/transforms.hpp"

namespace utm {

// Unknowns X = (g0^(1..n), i g1^(1..n)) at omega = -i kappa^2.
// A = A^L A^M with A^L = diag(exp(-i nu_j x_j), exp(i nu_j x_j)); A^M and Y^M = (A^L)^-1 Y
// are formed directly so that no large exponential is ever built.
struct InterfaceSystem {
  cplx kappa{};
  std::vector<cplx> nus;  // nu^(1) .. nu^(n+1)
  Eigen::MatrixXcd AM;
  Eigen::VectorXcd L;   // diagonal of A^L
  Eigen::VectorXcd YM;  // empty when assembled without data

  int n() const { return static_cast<int>(L.size()) / 2; }
  Eigen::MatrixXcd A() const { return L.asDiagonal() * AM; }
  Eigen::VectorXcd Y() const { return L.asDiagonal() * YM; }
};

// source > 0 keeps only the data of that region in Y
inline InterfaceSystem assemble_system(const PiecewisePotential& V, cplx kappa, const Transformer* T = nullptr,
                                       int source = 0) {
  const int n = V.n();
  if (n < 1) throw DomainError("interface system needs at least one jump");
  InterfaceSystem s;
  s.kappa = kappa;
  for (double a : V.levels) s.nus.push_back(nu(a, kappa));
  const auto& xs = V.interfaces;
  auto v = [&](int j) { return s.nus[j - 1]; };
  auto x = [&](int j) { return xs[j - 1]; };
  s.AM = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  s.L.resize(2 * n);
  if (T) s.YM.resize(2 * n);
  for (int j = 1; j <= n; ++j) {  // region j, left-moving relation, scaled by exp(i nu_j x_j)
    int r = j - 1;
    s.L(r) = std::exp(-I * v(j) * x(j));
    if (j >= 2) {
      cplx e = std::exp(-I * v(j) * (x(j - 1) - x(j)));
      s.AM(r, j - 2) = v(j) * e;
      s.AM(r, n + j - 2) = -e;
    }
    s.AM(r, j - 1) = -v(j);
    s.AM(r, n + j - 1) = 1.0;
    if (T) s.YM(r) = (source && source != j) ? cplx(0.0) : -(*T)(j, v(j)) / s.L(r);
  }
  for (int j = 2; j <= n + 1; ++j) {  // region j, right-moving relation, scaled by exp(-i nu_{j-1} x_{j-1})
    int r = n + j - 2;
    s.L(r) = std::exp(I * v(j - 1) * x(j - 1));
    cplx e0 = std::exp(I * (v(j) - v(j - 1)) * x(j - 1));
    s.AM(r, j - 2) = -v(j) * e0;
    s.AM(r, n + j - 2) = -e0;
    if (j <= n) {
      cplx e1 = std::exp(I * v(j) * x(j) - I * v(j - 1) * x(j - 1));
      s.AM(r, j - 1) = v(j) * e1;
      s.AM(r, n + j - 1) = e1;
    }
    if (T) s.YM(r) = (source && source != j) ? cplx(0.0) : -(*T)(j, -v(j)) / s.L(r);
  }
  return s;
}

struct SolveReport {
  Eigen::VectorXcd X;
  cplx det{};
  double condition = 0.0;
  double backward_error = 0.0;
};

// Cramer's rule for n <= 2, pivoted LU beyond.  Rejects systems with condition above 1e12.
inline SolveReport solve_unknowns(const InterfaceSystem& s) {
  if (s.YM.size() != s.AM.rows()) throw DomainError("system assembled without data");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(s.AM);
  SolveReport rep;
  double rc = lu.rcond();
  rep.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(rep.condition <= 1e12)) throw SingularSystemError(s.kappa);
  rep.det = lu.determinant();
  if (s.n() <= 2) {
    rep.X.resize(s.AM.cols());
    for (int i = 0; i < s.AM.cols(); ++i) {
      Eigen::MatrixXcd Mi = s.AM;
      Mi.col(i) = s.YM;
      rep.X(i) = Mi.determinant() / rep.det;
    }
  } else {
    rep.X = lu.solve(s.YM);
  }
  double scale = s.AM.cwiseAbs().rowwise().sum().maxCoeff() * rep.X.cwiseAbs().maxCoeff() +
                 s.YM.cwiseAbs().maxCoeff();
  rep.backward_error = scale > 0.0 ? (s.AM * rep.X - s.YM).cwiseAbs().maxCoeff() / scale : 0.0;
  return rep;
}

inline cplx scaled_determinant(const PiecewisePotential& V, cplx kappa) {
  return assemble_system(V, kappa).AM.determinant();
}

namespace detail {

// Winding number of f around a closed polyline, refined until each step turns by under 0.5 rad.
template <class F>
int winding_number(F&& f, const std::vector<cplx>& loop, int budget = 40000) {
  double total = 0.0;
  int used = 0;
  auto seg = [&](auto&& self, cplx a, cplx fa, cplx b, cplx fb, int depth) -> void {
    double d = std::arg(fb / fa);
    if (std::abs(d) < 0.5 || depth > 40 || used > budget) {
      total += d;
      return;
    }
    cplx m = 0.5 * (a + b);
    cplx fm = f(m);
    ++used;
    if (fm == 0.0) throw SingularSystemError(m);
    self(self, a, fa, m, fm, depth + 1);
    self(self, m, fm, b, fb, depth + 1);
  };
  std::vector<cplx> fv;
  for (cplx z : loop) fv.push_back(f(z));
  for (size_t i = 0; i < loop.size(); ++i) {
    size_t k = (i + 1) % loop.size();
    if (fv[i] == 0.0) throw SingularSystemError(loop[i]);
    seg(seg, loop[i], fv[i], loop[k], fv[k], 0);
  }
  if (used > budget) return 1 << 20;  // unresolved counts as unsafe
  return static_cast<int>(std::lround(total / (2.0 * pi)));
}

}  // namespace detail

struct InterfaceValues {
  int j = 0;
  double t = 0.0;
  cplx psi{}, psi_x{};
  double error_psi = 0.0, error_psi_x = 0.0;
};

class GeneralSolver {
 public:
  GeneralSolver(PiecewisePotential V, InitialCondition ic, SolverOptions opt = {})
      : V_(V), T_(std::move(V), std::move(ic)), opt_(opt) {
    if (V_.n() < 1) throw DomainError("general solver needs at least one jump");
    R_ = choose_radius();
  }

  const PiecewisePotential& potential() const { return V_; }
  const Transformer& transformer() const { return T_; }
  const SolverOptions& options() const { return opt_; }
  double radius() const { return R_; }

  // psi (order 0) or psi_x (order 1); at an interface the one-sided values are averaged
  SolutionSample evaluate(double x, double t, int order = 0) const {
    if (t < 0.0) throw DomainError("t must be non-negative");
    const auto& ic = T_.data();
    if (t == 0.0) return {x, t, order ? ic.derivative(x) : ic.value(x), 0.0};
    int j = V_.region_of(x);
    if (j >= 2 && x == V_.interfaces[j - 2]) {
      SolutionSample l = evaluate_side(j - 1, x, t, order), r = evaluate_side(j, x, t, order);
      return {x, t, 0.5 * (l.psi + r.psi), 0.5 * std::abs(l.psi - r.psi) + std::max(l.error, r.error)};
    }
    return evaluate_side(j, x, t, order);
  }

  // formula of region j evaluated at x, which may sit on the region's closure
  SolutionSample evaluate_side(int j, double x, double t, int order = 0) const {
    double R = R_;
    for (int attempt = 0;; ++attempt) {
      try {
        return evaluate_region(j, x, t, order, R);
      } catch (const SingularSystemError&) {
        if (attempt >= 4) throw;
        R *= 1.5;
      }
    }
  }

  // boundary values at interface x_j recovered from the data alone; source > 0 keeps only
  // the contribution of the data in that region
  InterfaceValues interface_values(int j, double t, int source = 0) const {
    if (j < 1 || j > V_.n()) throw DomainError("interface index out of range");
    if (source < 0 || source > V_.n() + 1) throw DomainError("source region out of range");
    if (!(t > 0.0)) throw DomainError("interface map needs t > 0");
    const int n = V_.n();
    double R = R_;
    for (int attempt = 0;; ++attempt) {
      try {
        InterfaceValues out{j, t};
        auto f0 = [&](cplx k) { return -k * std::exp(I * k * k * t) * unknowns(k, source).X(j - 1) / pi; };
        auto f1 = [&](cplx k) { return I * k * std::exp(I * k * k * t) * unknowns(k, source).X(n + j - 1) / pi; };
        Geometry g = geometry(R, 0.0, t);
        IntegralResult a = integrate(guarded_path(g, f0), f0, quad_options(opt_));
        IntegralResult b = integrate(guarded_path(g, f1), f1, quad_options(opt_));
        out.psi = a.value;
        out.psi_x = b.value;
        out.error_psi = a.error;
        out.error_psi_x = b.error;
        return out;
      } catch (const SingularSystemError&) {
        if (attempt >= 4) throw;
        R *= 1.5;
      }
    }
  }

  SolveReport unknowns(cplx kappa, int source = 0) const {
    return solve_unknowns(assemble_system(V_, kappa, &T_, source));
  }

  // imaginary-ray tilt after the zero-free check; exposed for tests
  Geometry guarded_geometry(Geometry g, double length) const {
    if (V_.n() < 2) return g;
    auto det = [&](cplx k) { return scaled_determinant(V_, k); };
    for (int h = 0; g.tilt_imag > 0.0; ++h) {
      cplx z0 = -I * std::max(g.R, g.depth);
      cplx d1 = std::exp(-I * (pi / 2 + g.tilt_imag));
      std::vector<cplx> loop{z0, z0 - I * length, z0 + length * d1};
      if (detail::winding_number(det, loop) == 0) break;
      g.tilt_imag = h >= 8 ? 0.0 : 0.5 * g.tilt_imag;
    }
    for (int h = 0; g.tilt_real > 0.0; ++h) {
      cplx e = std::exp(I * g.tilt_real);
      std::vector<cplx> loop{g.R, g.R + length, (g.R + length) * e};
      for (int i = 0; i <= 16; ++i) loop.push_back(g.R * std::exp(I * g.tilt_real * (1.0 - i / 16.0)));
      loop.pop_back();
      if (detail::winding_number(det, loop) == 0) break;
      g.tilt_real = h >= 8 ? 0.0 : 0.5 * g.tilt_real;
    }
    return g;
  }

  // d4 path sized for f, with the tilts reduced until the swept sectors are zero-free
  template <class F>
  ContourPath guarded_path(Geometry g, F&& f) const {
    ContourPath p = d4_path_for(g, f, opt_.tol);
    if (V_.n() < 2) return p;
    Geometry h = guarded_geometry(g, 1.05 * p.truncation_radius);
    if (h.tilt_imag == g.tilt_imag && h.tilt_real == g.tilt_real) return p;
    return d4_path_for(h, f, opt_.tol);
  }

 private:
  Geometry geometry(double R, double depth, double t) const {
    Geometry g;
    g.R = R;
    g.tilt_real = opt_.tilt_real;
    g.tilt_imag = imag_tilt(opt_, T_.data(), t);
    g.depth = opt_.follow_saddle ? depth : 0.0;
    g.truncation = opt_.truncation.value_or(0.0);
    return g;
  }

  SolutionSample evaluate_region(int j, double x, double t, int order, double R) const {
    const int n = V_.n();
    IntegralResult tot = order ? T_.free_term_dx(j, x, t, opt_.tol) : T_.free_term(j, x, t, opt_.tol);
    auto q = quad_options(opt_);
    if (j <= n) {
      double xj = V_.interfaces[j - 1];
      auto f = [&](cplx k) {
        SolveReport s = unknowns(k);
        cplx v = nu(V_.level(j), k);
        cplx d = order ? -I * v : cplx(1.0);
        return -1.0 / (2.0 * pi) * std::exp(-I * v * (x - xj) + I * k * k * t) *
               (k * s.X(n + j - 1) / v + k * s.X(j - 1)) * d;
      };
      tot += integrate(guarded_path(geometry(R, std::abs(x - xj) / (2.0 * t), t), f), f, q);
    }
    if (j >= 2) {
      double xj = V_.interfaces[j - 2];
      auto f = [&](cplx k) {
        SolveReport s = unknowns(k);
        cplx v = nu(V_.level(j), k);
        cplx d = order ? I * v : cplx(1.0);
        return 1.0 / (2.0 * pi) * std::exp(I * v * (x - xj) + I * k * k * t) *
               (k * s.X(n + j - 2) / v - k * s.X(j - 2)) * d;
      };
      tot += integrate(guarded_path(geometry(R, std::abs(x - xj) / (2.0 * t), t), f), f, q);
    }
    return {x, t, tot.value, tot.error};
  }

  // smallest radius from the default upward whose arc and ray starts keep |det A^M|
  // above 1e-6 |kappa|^n
  double choose_radius() const {
    double R = utm::radius(opt_, V_.Lambda);
    const int n = V_.n();
    for (int attempt = 0; attempt < 12; ++attempt) {
      bool ok = true;
      auto probe = [&](cplx k) {
        if (!ok) return;
        double d = std::abs(scaled_determinant(V_, k));
        if (!(d >= 1e-6 * std::pow(std::abs(k), n))) ok = false;
      };
      for (int i = 0; i <= 128; ++i) probe(R * std::exp(I * (opt_.tilt_real - (opt_.tilt_real + pi / 2) * i / 128.0)));
      for (int i = 1; i <= 64; ++i) {
        double r = R * (1.0 + 3.0 * i / 64.0);
        probe(r * std::exp(I * opt_.tilt_real));
        probe(-I * r);
      }
      if (ok) return R;
      R *= 1.5;
    }
    throw SingularSystemError(cplx(R, 0.0));
  }

  PiecewisePotential V_;
  Transformer T_;
  SolverOptions opt_;
  double R_ = 1.0;
};

}  // namespace utm
