#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "utm/general.hpp"
#include "utm/oracle.hpp"
#include "utm/step.hpp"

using namespace utm;

namespace {

// the unscaled interface matrix written out entry by entry
Eigen::MatrixXcd direct_matrix(const PiecewisePotential& V, cplx k) {
  const int n = V.n();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  auto v = [&](int j) { return nu(V.level(j), k); };
  auto x = [&](int j) { return V.interfaces[j - 1]; };
  for (int j = 1; j <= n; ++j) {
    int r = j - 1;
    if (j >= 2) {
      A(r, j - 2) = v(j) * std::exp(-I * v(j) * x(j - 1));
      A(r, n + j - 2) = -std::exp(-I * v(j) * x(j - 1));
    }
    A(r, j - 1) = -v(j) * std::exp(-I * v(j) * x(j));
    A(r, n + j - 1) = std::exp(-I * v(j) * x(j));
  }
  for (int j = 2; j <= n + 1; ++j) {
    int r = n + j - 2;
    A(r, j - 2) = -v(j) * std::exp(I * v(j) * x(j - 1));
    A(r, n + j - 2) = -std::exp(I * v(j) * x(j - 1));
    if (j <= n) {
      A(r, j - 1) = v(j) * std::exp(I * v(j) * x(j));
      A(r, n + j - 1) = std::exp(I * v(j) * x(j));
    }
  }
  return A;
}

cplx random_d4(std::mt19937_64& rng, double rmin, double rmax) {
  std::uniform_real_distribution<double> ur(rmin, rmax), ut(-pi / 2 + 1e-3, -1e-3);
  return std::polar(ur(rng), ut(rng));
}

const PiecewisePotential three_jumps({1.0, -2.0, 3.0, 0.5}, {0.0, 0.7, 1.6});

}  // namespace

TEST_CASE("n = 1 system") {
  auto V = PiecewisePotential::step(1.0, 2.0);
  cplx k(2.0, -1.5);
  auto s = assemble_system(V, k);
  cplx v1 = nu(1.0, k), v2 = nu(2.0, k);
  Eigen::Matrix2cd expect;
  expect << -v1, 1.0, -v2, -1.0;
  CHECK((s.A() - expect).norm() < 1e-14);
  CHECK(std::abs(s.A().determinant() - (v1 + v2)) < 1e-13);
  CHECK(std::abs(scaled_determinant(V, k) - (v1 + v2)) < 1e-13);
}

TEST_CASE("n = 1 unknowns agree with direct elimination") {
  auto V = PiecewisePotential::step(1.0, 2.0);
  auto ic = InitialCondition::gaussian(-0.3, 0.9);
  Transformer T(V, ic);
  cplx k(3.0, -2.0);
  auto rep = solve_unknowns(assemble_system(V, k, &T));
  cplx v1 = nu(1.0, k), v2 = nu(2.0, k);
  cplx y1 = -T(1, v1), y2 = -T(2, -v2);
  // -v1 X1 + X2 = y1, -v2 X1 - X2 = y2
  cplx X1 = -(y1 + y2) / (v1 + v2);
  cplx X2 = y1 + v1 * X1;
  CHECK(std::abs(rep.X(0) - X1) < 1e-12 * std::abs(X1));
  CHECK(std::abs(rep.X(1) - X2) < 1e-12 * std::abs(X2));
}

TEST_CASE("factorization identity at random points") {
  std::mt19937_64 rng(11);
  for (const auto& V : {PiecewisePotential::well(4.0, 1.0), PiecewisePotential::well(-3.0, 0.6), three_jumps}) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      cplx k = random_d4(rng, 3.0, 8.0);
      auto s = assemble_system(V, k);
      Eigen::MatrixXcd A = direct_matrix(V, k);
      worst = std::max(worst, (s.A() - A).norm() / A.norm());
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("block sparsity") {
  auto s = assemble_system(three_jumps, cplx(4.0, -3.0));
  const int n = 3;
  int nonzero = 0;
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < 2 * n; ++c) {
      if (s.AM(r, c) == 0.0) continue;
      ++nonzero;
      int rb = r % n, cb = c % n;
      if (r < n)
        CHECK((cb == rb || cb == rb - 1));
      else
        CHECK((cb == rb || cb == rb + 1));
    }
  CHECK(nonzero == 4 * (2 * n - 1));
}

TEST_CASE("backward error on a random three-jump instance") {
  Transformer T(three_jumps, InitialCondition::modulated(0.4, 1.1, 0.8));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    auto s = assemble_system(three_jumps, random_d4(rng, 3.0, 6.0), &T);
    auto rep = solve_unknowns(s);
    CHECK(rep.backward_error < 1e-10);
    CHECK((s.A() * rep.X - s.Y()).norm() / s.Y().norm() < 1e-10);
  }
}

TEST_CASE("singular systems are rejected") {
  InterfaceSystem s;
  s.kappa = 1.0;
  s.AM = Eigen::MatrixXcd::Ones(2, 2);
  s.L = Eigen::VectorXcd::Ones(2);
  s.YM = Eigen::VectorXcd::Ones(2);
  CHECK_THROWS_AS(solve_unknowns(s), SingularSystemError);
  s.YM.resize(0);
  CHECK_THROWS_AS(solve_unknowns(s), DomainError);
}

TEST_CASE("determinant growth") {
  for (const auto& V : {PiecewisePotential::well(4.0, 1.0), PiecewisePotential::well(-4.0, 1.0), three_jumps}) {
    double R = 1e3 * default_R(V.Lambda);
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i <= 200; ++i) {
      cplx k = std::polar(R, -pi / 2 * i / 200.0);
      double r = std::abs(scaled_determinant(V, k)) / std::pow(R, V.n());
      lo = std::min(lo, r), hi = std::max(hi, r);
    }
    CHECK(lo > 0.1);
    CHECK(hi < 100.0);
  }
}

TEST_CASE("winding number") {
  std::vector<cplx> loop;
  for (int i = 0; i < 8; ++i) loop.push_back(std::polar(1.0, 2.0 * pi * i / 8));
  CHECK(detail::winding_number([](cplx z) { return z; }, loop) == 1);
  CHECK(detail::winding_number([](cplx z) { return z * z * z; }, loop) == 3);
  CHECK(detail::winding_number([](cplx z) { return z - 3.0; }, loop) == 0);
}

TEST_CASE("zero potential reduces to free evolution") {
  GeneralSolver G(PiecewisePotential({0.0, 0.0, 0.0}, {0.0, 1.0}), InitialCondition::gaussian());
  for (double x : {-1.0, 0.5, 2.0}) CHECK(std::abs(G.evaluate(x, 0.4).psi - free_gaussian(x, 0.4)) < 1e-9);
}

TEST_CASE("one jump agrees with the step solver") {
  auto V = PiecewisePotential::step(1.0, 2.0);
  auto ic = InitialCondition::gaussian();
  GeneralSolver G(V, ic);
  StepProblem P{1.0, 2.0, ic};
  for (int order : {0, 1}) {
    auto a = G.evaluate(-0.5, 0.4, order);
    auto b = evaluate_step(P, -0.5, 0.4, {}, order);
    CHECK(std::abs(a.psi - b.psi) <= 5.0 * (a.error + b.error));
  }
}

TEST_CASE("barrier against the extrapolated Crank-Nicolson reference") {
  GeneralSolver G(PiecewisePotential::well(4.0, 1.0), InitialCondition::gaussian(-3.0));
  // scipy Crank-Nicolson on [-20, 20], Richardson extrapolated from h = 0.01, 0.005
  cplx ref(-0.021296353417050124, -0.07771943132061496);
  auto s = G.evaluate(2.0, 1.0);
  CHECK(std::abs(s.psi - ref) < 1e-3);
  CHECK(std::abs(s.psi - ref) < 1e-4);
  CHECK(std::abs(s.psi) > 0.05);
}

TEST_CASE("interface continuity with three jumps") {
  GeneralSolver G(three_jumps, InitialCondition::gaussian(0.5, 1.0));
  for (int j = 1; j <= 3; ++j)
    for (double t : {0.2, 0.7})
      for (int order : {0, 1}) {
        double xj = three_jumps.interfaces[j - 1];
        auto l = G.evaluate_side(j, xj, t, order), r = G.evaluate_side(j + 1, xj, t, order);
        CHECK(std::abs(l.psi - r.psi) < 1e-5);
      }
}

TEST_CASE("duplicated level matches the merged potential") {
  auto ic = InitialCondition::gaussian(-0.2, 1.0);
  GeneralSolver split(PiecewisePotential({1.0, 2.0, 2.0}, {0.0, 0.8}), ic);
  GeneralSolver merged(PiecewisePotential::step(1.0, 2.0), ic);
  for (double x : {-1.0, 0.4, 1.5}) {
    auto a = split.evaluate(x, 0.5), b = merged.evaluate(x, 0.5);
    CHECK(std::abs(a.psi - b.psi) <= 5.0 * (a.error + b.error));
  }
}

TEST_CASE("mass conservation for the barrier") {
  GeneralSolver G(PiecewisePotential::well(4.0, 1.0), InitialCondition::gaussian(-3.0));
  double m0 = std::sqrt(pi / 2.0);
  const double L = 14.0;
  const int n = 560;
  for (double t : {0.5, 1.0}) {
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = std::norm(G.evaluate(-L + 2.0 * L * i / n - 3.0, t).psi);
    double s = 0.0;
    for (int i = 0; i <= n; ++i) s += v[i] * ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0));
    CHECK(std::abs(s * (2.0 * L / n) / 3.0 - m0) < 1e-4);
  }
}
