#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "utm/contours.hpp"

using namespace utm;

namespace {

bool near(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("fourth-quadrant boundary geometry") {
  ContourPath p = boundary_of_DR(4, 2.0, 50.0);
  REQUIRE(p.legs.size() == 3);
  CHECK(near(p.legs[0].start(), 50.0));
  CHECK(near(p.legs[0].end(), 2.0));
  CHECK(p.legs[1].kind == Leg::Kind::Arc);
  CHECK(near(p.legs[1].end(), cplx(0.0, -2.0)));
  CHECK(near(p.legs[2].start(), cplx(0.0, -2.0)));
  CHECK(near(p.legs[2].end(), cplx(0.0, -50.0)));
  CHECK(p.continuous());
  CHECK(p.truncation_radius == 50.0);
}

TEST_CASE("first-quadrant boundary passes through R e^{i pi/4}") {
  ContourPath p = boundary_of_DR(1, 3.0, 40.0);
  REQUIRE(p.legs.size() == 3);
  CHECK(near(p.legs[1].point(0.5), std::polar(3.0, pi / 4)));
  CHECK(near(p.legs[0].start(), cplx(0.0, 40.0)));
  CHECK(near(p.legs[2].end(), 40.0));
  CHECK(p.continuous());
}

TEST_CASE("boundary preconditions") {
  CHECK_THROWS_AS(boundary_of_DR(4, 2.0, 50.0, 2.0), DomainError);  // R = sqrt(2 Lambda)
  CHECK_NOTHROW(boundary_of_DR(4, 2.01, 50.0, 2.0));
  CHECK_THROWS_AS(boundary_of_DR(5, 2.0, 50.0), DomainError);
  CHECK_THROWS_AS(boundary_of_DR(2, 2.0, 1.0), DomainError);
}

TEST_CASE("closed circle integral of 1/k^2 vanishes") {
  ContourPath c;
  c.legs.push_back(Leg::arc(1.7, 0.0, 2.0 * pi));
  auto r = integrate(c, [](cplx k) { return 1.0 / (k * k); });
  CHECK(std::abs(r.value) < 1e-12);
  auto s = integrate(c, [](cplx k) { return 1.0 / k; });
  CHECK(near(s.value, 2.0 * pi * I, 1e-12));
}

TEST_CASE("Gaussian integral") {
  ContourPath p;
  p.legs.push_back(Leg::segment(-50.0, 50.0));
  auto r = integrate(p, [](cplx k) { return std::exp(-k * k); });
  CHECK(std::abs(r.value - std::sqrt(pi)) < 1e-10);
  CHECK(r.error < 1e-9);
}

TEST_CASE("entire integrand around a square") {
  ContourPath p;
  cplx v[] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (int i = 0; i < 4; ++i) p.legs.push_back(Leg::segment(v[i], v[(i + 1) % 4]));
  CHECK(p.continuous());
  auto r = integrate(p, [](cplx k) { return std::exp(k); });
  CHECK(std::abs(r.value) < 1e-12);
}

TEST_CASE("principal value with symmetric exclusion") {
  ContourPath p;
  p.legs.push_back(Leg::segment(-40.0, 40.0));
  p.pv_poles.push_back(1.0);
  auto r = integrate(p, [](cplx k) { return 1.0 / (k - 1.0); });
  // mpmath: log(39) - log(41)
  CHECK(std::abs(r.value - (-0.050010420574661376)) < 1e-10);
}

TEST_CASE("reversal negates the integral to rounding") {
  ContourPath p = boundary_of_DR(4, 1.5, 6.0);
  auto f = [](cplx k) { return std::exp(-k * k * k * k) * (1.0 + k); };
  auto a = integrate(p, f), b = integrate(p.reversed(), f);
  CHECK(std::abs(a.value + b.value) <= a.roundoff + b.roundoff);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("radius independence and truncation") {
  // exp(-k^4) is entire and decays along both axes
  auto f = [](cplx k) { return std::exp(-k * k * k * k) * k * k; };
  auto a = integrate(boundary_of_DR(4, 0.6, 10.0), f);
  auto b = integrate(boundary_of_DR(4, 1.2, 10.0), f);
  CHECK(std::abs(a.value - b.value) <= 5.0 * (a.error + b.error));
  auto c = integrate(boundary_of_DR(4, 0.6, 5.0), f);
  auto d = integrate(boundary_of_DR(4, 0.6, 2.5), f);
  CHECK(std::abs(c.value - a.value) <= c.error + a.error);
  // a truncation that cuts into the integrand shows up in the tail bound
  CHECK(std::abs(d.value - a.value) <= d.error + a.error);
  CHECK(d.tail > c.tail);
}

TEST_CASE("tail bound for an exponentially decaying ray") {
  ContourPath p;
  Leg l = Leg::segment(0.0, 3.0);
  l.tail = Leg::Tail::AtEnd;
  p.legs.push_back(l);
  auto r = integrate(p, [](cplx k) { return std::exp(-2.0 * k); });
  double exact_tail = std::exp(-6.0) / 2.0;
  CHECK(std::abs(r.value - 0.5) <= r.error);
  CHECK(r.tail >= 0.5 * exact_tail);
}

TEST_CASE("quadrature failure names the worst leg") {
  ContourPath p;
  p.legs.push_back(Leg::segment(-2.0, -1.0));
  p.legs.push_back(Leg::segment(-1.0, 1.0));
  QuadOptions o;
  o.tol = 1e-14;
  o.max_intervals = 30;
  try {
    integrate(p, [](cplx k) { return 1.0 / std::sqrt(std::abs(k.real()) + 1e-300); }, o);
    FAIL("expected a quadrature failure");
  } catch (const QuadratureError& e) {
    CHECK(e.worst_leg == 1);
  }
}

TEST_CASE("real-line deformation") {
  ContourPath p1 = deform_to_real_line(1, std::nullopt, 30.0);
  REQUIRE(p1.legs.size() == 1);
  CHECK(near(p1.legs[0].start(), -30.0));
  CHECK(near(p1.legs[0].end(), 30.0));
  ContourPath p3 = deform_to_real_line(3, std::nullopt, 30.0);
  CHECK(near(p3.legs[0].start(), 30.0));
  auto f = [](cplx k) { return std::exp(-k * k) * (1.0 + k); };
  CHECK(near(integrate(p3, f).value, -integrate(p1, f).value, 1e-14));

  KeyholeSpec up{KeyholeSpec::Axis::Imaginary, 1.0, KeyholeSpec::Range::Theta12};
  ContourPath k1 = deform_to_real_line(1, up, 30.0);
  REQUIRE(k1.legs.size() == 3);
  CHECK(near(k1.legs[1].start(), 0.0));
  CHECK(near(k1.legs[1].end(), I));
  CHECK(k1.legs[1].side == Side::Left);
  CHECK(near(k1.legs[2].end(), 0.0));
  CHECK(k1.legs[2].side == Side::Right);

  KeyholeSpec down{KeyholeSpec::Axis::Imaginary, 2.0, KeyholeSpec::Range::Theta34};
  ContourPath k3 = deform_to_real_line(3, down, 30.0);
  CHECK(near(k3.legs[1].start(), -2.0 * I));

  KeyholeSpec real{KeyholeSpec::Axis::Real, 1.0, KeyholeSpec::Range::Theta56};
  CHECK(deform_to_real_line(1, real, 30.0).legs[0].side == Side::Above);
  CHECK(deform_to_real_line(3, real, 30.0).legs[0].side == Side::Below);

  CHECK_THROWS_AS(deform_to_real_line(2, std::nullopt, 30.0), ConfigError);
  CHECK_THROWS_AS(deform_to_real_line(1, down, 30.0), ConfigError);
  CHECK_THROWS_AS(deform_to_real_line(3, up, 30.0), ConfigError);
  KeyholeSpec bad{KeyholeSpec::Axis::Real, 1.0, KeyholeSpec::Range::Theta12};
  CHECK_THROWS_AS(deform_to_real_line(1, bad, 30.0), ConfigError);
}

TEST_CASE("fourth-quadrant working contour") {
  Geometry g;
  g.R = 2.0;
  g.depth = 5.0;
  ContourPath p = d4_path(g, 10.0, 10.0);
  CHECK(p.continuous());
  CHECK(near(p.legs.front().end(), 2.0 * std::exp(I * g.tilt_real)));
  CHECK(near(p.legs.back().start(), -5.0 * I));
}
