#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "utm/general.hpp"
#include "utm/oracle.hpp"
#include "utm/step.hpp"

using namespace utm;

namespace {

const PiecewisePotential three_jumps({1.0, -2.0, 3.0, 0.5}, {0.0, 0.7, 1.6});

void check_against_full(const GeneralSolver& G, double t) {
  for (int j = 1; j <= G.potential().n(); ++j) {
    double xj = G.potential().interfaces[j - 1];
    auto v = G.interface_values(j, t);
    auto a = G.evaluate(xj, t, 0), b = G.evaluate(xj, t, 1);
    CHECK(std::abs(v.psi - a.psi) <= 5.0 * (v.error_psi + a.error));
    CHECK(std::abs(v.psi_x - b.psi) <= 5.0 * (v.error_psi_x + b.error));
  }
}

}  // namespace

TEST_CASE("free trace at the origin") {
  GeneralSolver G(PiecewisePotential::step(0.0, 0.0), InitialCondition::gaussian());
  for (double t : {0.1, 0.5, 2.0}) {
    auto v = G.interface_values(1, t);
    CHECK(std::abs(v.psi - 1.0 / std::sqrt(1.0 + 4.0 * I * t)) < 1e-9);
    CHECK(std::abs(v.psi_x) < 1e-9);
  }
}

TEST_CASE("step traces match the step solver") {
  StepProblem P{1.0, 2.0, InitialCondition::gaussian()};
  GeneralSolver G(P.potential(), P.psi0);
  auto v = G.interface_values(1, 0.5);
  auto a = evaluate_step(P, 0.0, 0.5), b = evaluate_step(P, 0.0, 0.5, {}, 1);
  CHECK(std::abs(v.psi - a.psi) <= 5.0 * (v.error_psi + a.error));
  CHECK(std::abs(v.psi_x - b.psi) <= 5.0 * (v.error_psi_x + b.error));
}

TEST_CASE("barrier trace against the extrapolated Crank-Nicolson reference") {
  GeneralSolver G(PiecewisePotential::well(4.0, 1.0), InitialCondition::gaussian(-3.0));
  // scipy Crank-Nicolson on [-20, 20], Richardson extrapolated from h = 0.01, 0.005
  cplx ref(-0.06889509906066577, 0.09711943113029675);
  CHECK(std::abs(G.interface_values(2, 1.0).psi - ref) < 1e-3);
}

TEST_CASE("consistency with the full solution") {
  GeneralSolver a(PiecewisePotential::well(4.0, 1.0), InitialCondition::gaussian(-0.5));
  GeneralSolver b(PiecewisePotential::well(-4.0, 1.0), InitialCondition::gaussian(0.3));
  GeneralSolver c(three_jumps, InitialCondition::modulated(0.2, 1.0, 1.0));
  for (double t : {0.1, 0.5, 1.0}) {
    check_against_full(a, t);
    check_against_full(b, t);
    check_against_full(c, t);
  }
}

TEST_CASE("short-time limit") {
  auto ic = InitialCondition::gaussian(0.3);
  auto V = PiecewisePotential::well(4.0, 1.0);
  GeneralSolver G(V, ic);
  const double t = 1e-4;
  for (int j : {1, 2}) {
    double xj = V.interfaces[j - 1];
    auto v = G.interface_values(j, t);
    CHECK(std::abs(v.psi - ic.value(xj)) < 1e-3);
    // the jump d of the potential opens a layer in psi_x of size d psi0 sqrt(t / pi)
    double d = V.level(j + 1) - V.level(j);
    cplx layer = -I * d * ic.value(xj) * std::sqrt(t / (pi * I));
    CHECK(std::abs(v.psi_x - ic.derivative(xj) - layer) < 1e-3);
  }
}

TEST_CASE("linearity") {
  auto V = PiecewisePotential::well(-4.0, 1.0);
  auto A = InitialCondition::gaussian(-1.0, 0.8);
  auto B = InitialCondition::modulated(1.5, 1.2, -0.7, cplx(0.5, 0.25));
  InitialCondition AB = A;
  AB.kind = InitialCondition::Kind::ModulatedGaussian;
  AB.terms.push_back(B.terms[0]);
  GeneralSolver GA(V, A), GB(V, B), GAB(V, AB);
  for (int j : {1, 2}) {
    auto a = GA.interface_values(j, 0.6), b = GB.interface_values(j, 0.6), s = GAB.interface_values(j, 0.6);
    CHECK(std::abs(s.psi - a.psi - b.psi) <= a.error_psi + b.error_psi + s.error_psi);
    CHECK(std::abs(s.psi_x - a.psi_x - b.psi_x) <= a.error_psi_x + b.error_psi_x + s.error_psi_x);
  }
}

TEST_CASE("per-region decomposition sums to the trace") {
  GeneralSolver G(three_jumps, InitialCondition::gaussian(0.8, 1.0));
  for (int j = 1; j <= 3; ++j) {
    auto total = G.interface_values(j, 0.4);
    cplx s = 0.0, sx = 0.0;
    double e = total.error_psi, ex = total.error_psi_x;
    for (int l = 1; l <= 4; ++l) {
      auto p = G.interface_values(j, 0.4, l);
      s += p.psi, sx += p.psi_x, e += p.error_psi, ex += p.error_psi_x;
    }
    CHECK(std::abs(s - total.psi) <= e);
    CHECK(std::abs(sx - total.psi_x) <= ex);
  }
  CHECK_THROWS_AS(G.interface_values(1, 0.4, 5), DomainError);
}

TEST_CASE("independence of the ray tilts") {
  auto V = PiecewisePotential::well(4.0, 1.0);
  auto ic = InitialCondition::gaussian(-1.0);
  SolverOptions o1, o2, o3;
  o2.tilt_real = pi / 16;
  o3.tilt_imag = 0.1;
  GeneralSolver G1(V, ic, o1), G2(V, ic, o2), G3(V, ic, o3);
  for (int j : {1, 2}) {
    auto a = G1.interface_values(j, 0.5), b = G2.interface_values(j, 0.5), c = G3.interface_values(j, 0.5);
    CHECK(std::abs(a.psi - b.psi) <= 5.0 * (a.error_psi + b.error_psi));
    CHECK(std::abs(a.psi - c.psi) <= 5.0 * (a.error_psi + c.error_psi));
    CHECK(std::abs(a.psi_x - b.psi_x) <= 5.0 * (a.error_psi_x + b.error_psi_x));
  }
}

TEST_CASE("preconditions") {
  GeneralSolver G(PiecewisePotential::well(4.0, 1.0), InitialCondition::gaussian());
  CHECK_THROWS_AS(G.interface_values(0, 0.5), DomainError);
  CHECK_THROWS_AS(G.interface_values(3, 0.5), DomainError);
  CHECK_THROWS_AS(G.interface_values(1, 0.0), DomainError);
}
