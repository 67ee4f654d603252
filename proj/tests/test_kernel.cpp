#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "utm/faddeeva.hpp"
#include "utm/kernel.hpp"

using namespace utm;

namespace {

cplx random_off_cut(std::mt19937_64& rng, double alpha) {
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (;;) {
    cplx k(u(rng), u(rng));
    if (std::abs(k) > 1e-3 && !on_cut(alpha, k) && std::abs(k.real()) > 1e-9 && std::abs(k.imag()) > 1e-9) return k;
  }
}

}  // namespace

TEST_CASE("nu examples") {
  CHECK(std::abs(nu(0.0, {1.0, 1.0}) - cplx(-1.0, 1.0)) < 1e-15);
  CHECK(std::abs(nu(1.0, 2.0) - cplx(0.0, std::sqrt(5.0))) < 1e-14);
  CHECK(std::abs(nu(1.0, -2.0) - cplx(0.0, -std::sqrt(5.0))) < 1e-14);
}

TEST_CASE("nu rejects points on the cut") {
  CHECK_THROWS_AS(nu(1.0, cplx(0.0, 0.5)), CutError);
  CHECK_THROWS_AS(nu(1.0, cplx(0.0, -1.0)), CutError);
  CHECK_THROWS_AS(nu(-4.0, cplx(1.5, 0.0)), CutError);
  try {
    nu(-4.0, cplx(-0.25, 0.0));
  } catch (const CutError& e) {
    CHECK(e.kappa == cplx(-0.25, 0.0));
  }
  CHECK_NOTHROW(nu(1.0, cplx(0.0, 1.5)));
  CHECK_NOTHROW(nu(-4.0, cplx(2.5, 0.0)));
}

TEST_CASE("omega examples") {
  CHECK(omega(0.0, 1.0) == I);
  CHECK(omega(1.0, 0.0) == I);
  CHECK(std::abs(omega(2.0, {1.0, 1.0}) - cplx(-2.0, 2.0)) < 1e-15);
  CHECK(omega(3.0, 1.7).real() == 0.0);
}

TEST_CASE("sign law examples") {
  CHECK(sign_of_re_minus_i_nu(1.0, {3.0, -2.0}) == 1);
  CHECK(sign_of_re_minus_i_nu(-1.0, {-3.0, 0.5}) == -1);
  // mpmath: nu(5, 0.01-10i) = 9.7467946148029642 + 0.010259783236647338i
  CHECK(std::abs(nu(5.0, {0.01, -10.0}) - cplx(9.7467946148029642, 0.010259783236647338)) < 1e-13);
  CHECK(sign_of_re_minus_i_nu(5.0, {0.01, -10.0}) == 1);
  CHECK_THROWS_AS(sign_of_re_minus_i_nu(1.0, cplx(0.0, 3.0)), DomainError);
  CHECK_THROWS_AS(sign_of_re_minus_i_nu(-4.0, cplx(1.0, 0.0)), DomainError);
}

TEST_CASE("antisymmetry, algebraic relation and sign law on random samples") {
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> ua(-10.0, 10.0);
  double worst_anti = 0.0, worst_alg = 0.0;
  int sign_fail = 0;
  for (int i = 0; i < 10000; ++i) {
    double a = ua(rng);
    cplx k = random_off_cut(rng, a);
    cplx v = nu(a, k);
    worst_anti = std::max(worst_anti, std::abs(nu(a, -k) + v) / std::abs(v));
    worst_alg = std::max(worst_alg, std::abs(v * v + (k * k + a)) / std::abs(k * k + a));
    if (sign_of_re_minus_i_nu(a, k) != (k.real() > 0 ? 1 : -1)) ++sign_fail;
  }
  CHECK(worst_anti < 1e-12);
  CHECK(worst_alg < 1e-12);
  CHECK(sign_fail == 0);
}

TEST_CASE("asymptotic flattening") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(-10.0, 10.0), ut(-pi, pi);
  for (int i = 0; i < 2000; ++i) {
    double a = ua(rng);
    double r = 100.0 * std::sqrt(1.0 + std::abs(a)) * (1.0 + 10.0 * std::abs(ut(rng)));
    cplx k = std::polar(r, ut(rng));
    if (on_cut(a, k)) continue;
    CHECK(std::abs(nu(a, k) - I * k) < std::abs(a) / std::abs(k) + 1e-300);
  }
}

TEST_CASE("continuity near kappa = 0") {
  // no spurious singularity: nu -> i sqrt(alpha) from the right half-plane
  cplx small(1e-9, -1e-9);
  CHECK(std::abs(nu(2.0, small) - I * std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(nu(2.0, -small) + I * std::sqrt(2.0)) < 1e-12);
  CHECK(std::isfinite(std::abs(nu(2.0, cplx(1e-200, 1e-200)))));
}

TEST_CASE("potential construction") {
  PiecewisePotential V({1.0, -3.0, 2.0}, {0.0, 1.5});
  CHECK(V.n() == 2);
  CHECK(V.Lambda == 3.0);
  CHECK(V.region_of(-1.0) == 1);
  CHECK(V.region_of(0.7) == 2);
  CHECK(V.region_of(2.0) == 3);
  CHECK_THROWS_AS(PiecewisePotential({1.0, 2.0}, {0.5}), ConfigError);
  CHECK_THROWS_AS(PiecewisePotential({1.0, 2.0, 3.0}, {0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(PiecewisePotential({1.0, 2.0}, {0.0, 1.0}), ConfigError);
}

TEST_CASE("Faddeeva function against mpmath") {
  struct Ref {
    cplx z, w;
  };
  const Ref refs[] = {
      {{1.0, 1.0}, {0.30474420525691259, 0.20821893820283163}},
      {{0.5, 0.01}, {0.77234501841006655, 0.47121688569118492}},
      {{-3.0, 2.0}, {0.092710766426443334, -0.12831696222826158}},
      {{10.0, 0.5}, {0.0028569536993223132, 0.056560328935308771}},
      {{2.0, -0.5}, {-0.12293249482276237, 0.32755513633331259}},
  };
  for (const auto& r : refs) CHECK(std::abs(faddeeva(r.z) - r.w) < 1e-12 * std::abs(r.w));
  CHECK(std::abs(erfc_c(0.0) - 1.0) < 1e-15);
  CHECK(std::abs(erfc_c(1.0) - std::erfc(1.0)) < 1e-14);
  CHECK(std::abs(erfc_c(-2.0) - std::erfc(-2.0)) < 1e-14);
}
