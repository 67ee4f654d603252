#pragma once

// Contour paths in the spectral plane and adaptive Gauss-Kronrod quadrature along them.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <queue>
#include <type_traits>
#include <vector>

#include "utm/common.hpp"

namespace utm {

// which one-sided value an integrand should take on a leg hugging a cut
enum class Side : int { None = 0, Left = 1, Right = 2, Below = 3, Above = 4 };

struct Leg {
  enum class Kind { Segment, Arc, Fold };
  enum class Tail { None, AtStart, AtEnd };

  Kind kind = Kind::Segment;
  cplx a{}, b{};  // segment ends; for a fold, a is the pole and b the half-span vector
  cplx center{};
  double radius = 0.0, th0 = 0.0, th1 = 0.0;
  Side side = Side::None;
  Tail tail = Tail::None;

  static Leg segment(cplx from, cplx to, Side s = Side::None) {
    Leg l;
    l.a = from;
    l.b = to;
    l.side = s;
    return l;
  }
  static Leg arc(double r, double from, double to, cplx c = 0.0) {
    Leg l;
    l.kind = Kind::Arc;
    l.radius = r;
    l.th0 = from;
    l.th1 = to;
    l.center = c;
    return l;
  }
  static Leg fold(cplx pole, cplx half_span, Side s = Side::None) {
    Leg l;
    l.kind = Kind::Fold;
    l.a = pole;
    l.b = half_span;
    l.side = s;
    return l;
  }

  cplx point(double s) const {
    switch (kind) {
      case Kind::Segment: return a + s * (b - a);
      case Kind::Arc: return center + radius * std::exp(I * (th0 + s * (th1 - th0)));
      case Kind::Fold: return a + s * b;
    }
    return 0.0;
  }
  cplx deriv(double s) const {
    switch (kind) {
      case Kind::Segment: return b - a;
      case Kind::Arc: return I * (th1 - th0) * radius * std::exp(I * (th0 + s * (th1 - th0)));
      case Kind::Fold: return b;
    }
    return 0.0;
  }
  cplx start() const { return point(0.0); }
  cplx end() const { return kind == Kind::Fold ? a : point(1.0); }
  double length() const {
    switch (kind) {
      case Kind::Segment: return std::abs(b - a);
      case Kind::Arc: return radius * std::abs(th1 - th0);
      case Kind::Fold: return std::abs(b);
    }
    return 0.0;
  }

  Leg reversed() const {
    Leg l = *this;
    switch (kind) {
      case Kind::Segment: std::swap(l.a, l.b); break;
      case Kind::Arc: std::swap(l.th0, l.th1); break;
      case Kind::Fold: l.b = -b; break;
    }
    if (tail == Tail::AtStart) l.tail = Tail::AtEnd;
    if (tail == Tail::AtEnd) l.tail = Tail::AtStart;
    return l;
  }
  // multiply every point by u (a rotation when |u| = 1)
  Leg mapped(cplx u) const {
    Leg l = *this;
    switch (kind) {
      case Kind::Segment:
      case Kind::Fold:
        l.a = a * u;
        l.b = b * u;
        break;
      case Kind::Arc:
        l.center = center * u;
        l.radius = radius * std::abs(u);
        l.th0 = th0 + std::arg(u);
        l.th1 = th1 + std::arg(u);
        break;
    }
    return l;
  }
};

struct ContourPath {
  std::vector<Leg> legs;
  double truncation_radius = 0.0;
  double tolerance = 1e-10;
  std::vector<double> pv_poles;  // real poles handled by symmetric exclusion

  ContourPath reversed() const {
    ContourPath p = *this;
    p.legs.clear();
    for (auto it = legs.rbegin(); it != legs.rend(); ++it) p.legs.push_back(it->reversed());
    return p;
  }
  ContourPath rotated(cplx u) const {
    ContourPath p = *this;
    for (auto& l : p.legs) l = l.mapped(u);
    return p;
  }
  ContourPath& append(const ContourPath& o) {
    legs.insert(legs.end(), o.legs.begin(), o.legs.end());
    truncation_radius = std::max(truncation_radius, o.truncation_radius);
    return *this;
  }
  bool continuous(double tol = 1e-12) const {
    for (size_t i = 1; i < legs.size(); ++i) {
      if (legs[i].kind == Leg::Kind::Fold || legs[i - 1].kind == Leg::Kind::Fold) continue;
      cplx e = legs[i - 1].end(), s = legs[i].start();
      if (std::abs(e - s) > tol * std::max(1.0, std::abs(e))) return false;
    }
    return true;
  }
};

struct IntegralResult {
  cplx value{};
  double error = 0.0;  // quadrature + tail + rounding
  double quad_error = 0.0;
  double tail = 0.0;
  double roundoff = 0.0;
  long evaluations = 0;
  int worst_leg = -1;

  IntegralResult& operator+=(const IntegralResult& o) {
    value += o.value;
    error += o.error;
    quad_error += o.quad_error;
    tail += o.tail;
    roundoff += o.roundoff;
    evaluations += o.evaluations;
    return *this;
  }
};

struct QuadOptions {
  double tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 60000;
  int min_split = 2;
  int probe_points = 48;
};

namespace detail {

inline constexpr std::array<double, 8> gk_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> gk_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
cplx call(F& f, cplx z, Side s) {
  if constexpr (std::is_invocable_v<F&, cplx, Side>)
    return f(z, s);
  else
    return f(z);
}

// integrand in the leg parameter, including the Jacobian
template <class F>
cplx leg_value(F& f, const Leg& l, double s) {
  if (l.kind == Leg::Kind::Fold)
    return (call(f, l.a + s * l.b, l.side) + call(f, l.a - s * l.b, l.side)) * l.b;
  return call(f, l.point(s), l.side) * l.deriv(s);
}

struct Piece {
  int leg;
  double s0, s1;
  cplx value;
  double err, absval;
  bool operator<(const Piece& o) const { return err < o.err; }
};

template <class F>
Piece gk15(F& f, const Leg& l, int leg, double s0, double s1) {
  double c = 0.5 * (s0 + s1), h = 0.5 * (s1 - s0);
  cplx fc = leg_value(f, l, c);
  cplx k = gk_wk[7] * fc, g = gk_wg[3] * fc;
  double ab = gk_wk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    cplx f1 = leg_value(f, l, c - h * gk_x[j]);
    cplx f2 = leg_value(f, l, c + h * gk_x[j]);
    k += gk_wk[j] * (f1 + f2);
    ab += gk_wk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) g += gk_wg[j / 2] * (f1 + f2);
  }
  return {leg, s0, s1, k * h, std::abs((k - g) * h), ab * std::abs(h)};
}

template <class F>
int probe_splits(F& f, const Leg& l, int n) {
  int changes = 0;
  cplx prev{};
  for (int i = 0; i <= n; ++i) {
    cplx v = leg_value(f, l, (i + 0.5) / (n + 1.0));
    if (i > 0) {
      if ((v.real() > 0) != (prev.real() > 0)) ++changes;
      if ((v.imag() > 0) != (prev.imag() > 0)) ++changes;
    }
    prev = v;
  }
  return changes;
}

template <class F>
double tail_bound(F& f, const Leg& l) {
  if (l.tail == Leg::Tail::None) return 0.0;
  double len = l.length();
  auto mag = [&](double d) {
    double s = l.tail == Leg::Tail::AtEnd ? 1.0 - d : d;
    return std::abs(call(f, l.point(s), l.side));
  };
  double near = 0.0, far = 0.0;
  for (int j = 0; j < 4; ++j) near = std::max(near, mag(0.01 * j));
  for (int j = 5; j < 9; ++j) far = std::max(far, mag(0.01 * j));
  if (near == 0.0) return 0.0;
  double lam = std::log(far / near) / (0.05 * len);
  if (!(lam > 0.0)) return near * len;
  return near / lam;
}

inline std::vector<Leg> split_pv(const ContourPath& p) {
  if (p.pv_poles.empty()) return p.legs;
  std::vector<Leg> out;
  for (const Leg& l : p.legs) {
    bool real_seg = l.kind == Leg::Kind::Segment && l.a.imag() == 0.0 && l.b.imag() == 0.0;
    std::vector<double> inside;
    if (real_seg) {
      double lo = std::min(l.a.real(), l.b.real()), hi = std::max(l.a.real(), l.b.real());
      for (double c : p.pv_poles)
        if (c > lo && c < hi) inside.push_back(c);
    }
    if (inside.empty()) {
      out.push_back(l);
      continue;
    }
    bool fwd = l.b.real() > l.a.real();
    std::sort(inside.begin(), inside.end());
    if (!fwd) std::reverse(inside.begin(), inside.end());
    double cur = l.a.real();
    for (size_t i = 0; i < inside.size(); ++i) {
      double c = inside[i];
      double nxt = i + 1 < inside.size() ? inside[i + 1] : l.b.real();
      double h = 0.5 * std::min(std::abs(c - cur), std::abs(nxt - c));
      double dir = fwd ? 1.0 : -1.0;
      Leg s1 = Leg::segment(cur, c - dir * h, l.side);
      if (i == 0 && l.tail == Leg::Tail::AtStart) s1.tail = Leg::Tail::AtStart;
      out.push_back(s1);
      out.push_back(Leg::fold(c, dir * h, l.side));
      cur = c + dir * h;
    }
    Leg last = Leg::segment(cur, l.b.real(), l.side);
    if (l.tail == Leg::Tail::AtEnd) last.tail = Leg::Tail::AtEnd;
    out.push_back(last);
  }
  return out;
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7,15) over all legs of a path.
template <class F>
IntegralResult integrate(const ContourPath& path, F&& f, QuadOptions opt = {}) {
  using detail::Piece;
  std::vector<Leg> legs = detail::split_pv(path);
  IntegralResult res;
  std::priority_queue<Piece> heap;
  std::vector<Piece> frozen;
  long evals = 0;
  for (int li = 0; li < static_cast<int>(legs.size()); ++li) {
    const Leg& l = legs[li];
    int n0 = std::max(opt.min_split, detail::probe_splits(f, l, opt.probe_points));
    evals += opt.probe_points + 1;
    n0 = std::min(n0, 4000);
    for (int i = 0; i < n0; ++i) {
      heap.push(detail::gk15(f, l, li, double(i) / n0, double(i + 1) / n0));
      evals += 15;
    }
  }
  double tail = 0.0;
  for (const Leg& l : legs) tail += detail::tail_bound(f, l);

  auto totals = [&](cplx& v, double& e, double& ab) {
    v = 0.0;
    e = 0.0;
    ab = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().err;
      ab += copy.top().absval;
      copy.pop();
    }
    for (const auto& p : frozen) {
      v += p.value;
      e += p.err;
      ab += p.absval;
    }
  };

  cplx v;
  double err, absint;
  totals(v, err, absint);
  int iter = 0;
  while (true) {
    double round = 50.0 * eps * absint;
    double target = std::max({opt.tol, opt.rel_tol * std::abs(v), round});
    if (err <= target || heap.empty()) break;
    if (static_cast<int>(heap.size() + frozen.size()) >= opt.max_intervals) {
      int worst = heap.empty() ? -1 : heap.top().leg;
      throw QuadratureError("subdivision budget exhausted, error " + std::to_string(err), worst);
    }
    Piece p = heap.top();
    heap.pop();
    double m = 0.5 * (p.s0 + p.s1);
    if (!(m > p.s0 && m < p.s1) || (p.s1 - p.s0) < 1e-13) {
      frozen.push_back(p);
      continue;
    }
    Piece a = detail::gk15(f, legs[p.leg], p.leg, p.s0, m);
    Piece b = detail::gk15(f, legs[p.leg], p.leg, m, p.s1);
    evals += 30;
    v += a.value + b.value - p.value;
    err += a.err + b.err - p.err;
    absint += a.absval + b.absval - p.absval;
    heap.push(a);
    heap.push(b);
    if (++iter % 200 == 0) totals(v, err, absint);
  }

  // deterministic final summation in path order
  std::vector<Piece> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Piece& x, const Piece& y) {
    return x.leg != y.leg ? x.leg < y.leg : x.s0 < y.s0;
  });
  cplx total = 0.0;
  double qerr = 0.0, ab = 0.0, worst_err = -1.0;
  for (const auto& p : all) {
    total += p.value;
    qerr += p.err;
    ab += p.absval;
    if (p.err > worst_err) {
      worst_err = p.err;
      res.worst_leg = p.leg;
    }
  }
  res.value = total;
  res.quad_error = qerr;
  res.tail = tail;
  res.roundoff = 50.0 * eps * ab;
  res.error = qerr + tail + res.roundoff;
  res.evaluations = evals;
  return res;
}

// Length along z0 + s*dir beyond which |f| has decayed so the tail integral is below tol/100.
template <class F>
double ray_extent(F&& f, cplx z0, cplx dir, double tol, double L0 = 1.0, double Lmax = 1e7,
                  Side side = Side::None) {
  dir /= std::abs(dir);
  auto m = [&](double L) {
    double r = 0.0;
    for (int j = 0; j < 4; ++j)
      r = std::max(r, std::abs(detail::call(f, z0 + dir * (L * (1.0 + 0.02 * j)), side)));
    return r;
  };
  double L = L0, prev = m(L);
  const double g = 1.3;
  while (L < Lmax) {
    double Ln = L * g;
    double cur = m(Ln);
    if (cur == 0.0) return Ln;
    double lam = std::log(prev / cur) / (Ln - L);
    if (lam > 0.0 && cur / lam < 0.01 * tol) return Ln * 1.06;
    prev = cur;
    L = Ln;
  }
  throw QuadratureError("integrand does not decay along ray from " + fmt_c(z0), -1);
}

// Boundary of the j-th quadrant minus the disk |k| <= R, region on the left.
inline ContourPath boundary_of_DR(int quadrant, double R, double truncation, double Lambda = 0.0) {
  if (quadrant < 1 || quadrant > 4) throw DomainError("quadrant must be 1..4");
  if (!(R > std::sqrt(2.0 * Lambda)))
    throw DomainError("R too small: need R > sqrt(2*Lambda) with Lambda=" + std::to_string(Lambda));
  if (!(truncation > R)) throw DomainError("truncation must exceed R");
  ContourPath p;
  p.legs.push_back(Leg::segment(truncation, R));
  p.legs.push_back(Leg::arc(R, 0.0, -pi / 2));
  p.legs.push_back(Leg::segment(-I * R, -I * truncation));
  p.legs.front().tail = Leg::Tail::AtStart;
  p.legs.back().tail = Leg::Tail::AtEnd;
  p.truncation_radius = truncation;
  static const cplx rot[4] = {I, -1.0, -I, 1.0};
  return p.rotated(rot[quadrant - 1]);
}

// Geometry of the working fourth-quadrant contour: the real ray is tilted into the first
// quadrant, the arc joins it to -iR, the imaginary axis is followed down to the saddle
// depth, and the last ray leans into the third quadrant.
struct Geometry {
  double R = 1.0;
  double tilt_real = pi / 8;
  double depth = 0.0;
  double tilt_imag = pi / 4;
  double truncation = 0.0;  // fixed ray length; 0 sizes the rays from the integrand decay
};

inline ContourPath d4_path(const Geometry& g, double len_real, double len_imag) {
  ContourPath p;
  cplx er = std::exp(I * g.tilt_real);
  Leg in = Leg::segment((g.R + len_real) * er, g.R * er);
  in.tail = Leg::Tail::AtStart;
  p.legs.push_back(in);
  p.legs.push_back(Leg::arc(g.R, g.tilt_real, -pi / 2));
  cplx z = -I * g.R;
  if (g.depth > g.R) {
    p.legs.push_back(Leg::segment(z, -I * g.depth));
    z = -I * g.depth;
  }
  Leg out = Leg::segment(z, z + len_imag * std::exp(-I * (pi / 2 + g.tilt_imag)));
  out.tail = Leg::Tail::AtEnd;
  p.legs.push_back(out);
  p.truncation_radius = std::max(std::abs(in.a), std::abs(out.b));
  return p;
}

// d4_path with ray lengths chosen from the decay of f
template <class F>
ContourPath d4_path_for(const Geometry& g, F&& f, double tol) {
  if (g.truncation > 0.0) {
    ContourPath p = d4_path(g, g.truncation, g.truncation);
    p.tolerance = tol;
    return p;
  }
  cplx er = std::exp(I * g.tilt_real);
  double Lr = ray_extent(f, g.R * er, er, tol, std::max(1.0, g.R));
  cplx z = -I * std::max(g.R, g.depth);
  cplx ei = std::exp(-I * (pi / 2 + g.tilt_imag));
  double Li = ray_extent(f, z, ei, tol, std::max(1.0, g.R));
  ContourPath p = d4_path(g, Lr, Li);
  p.tolerance = tol;
  return p;
}

struct KeyholeSpec {
  enum class Axis { Imaginary, Real };
  enum class Range { Theta12, Theta34, Theta56 };
  Axis cut_axis = Axis::Imaginary;
  double half_length = 0.0;
  Range angular_range = Range::Theta12;
};

// Real-line principal-value path equivalent to the quadrant boundary, plus the two legs
// hugging an imaginary-axis cut.  Quadrant 3 carries the real line with reversed direction.
inline ContourPath deform_to_real_line(int quadrant, std::optional<KeyholeSpec> cut,
                                       double truncation) {
  if (quadrant != 1 && quadrant != 3)
    throw ConfigError("quadrant", "real-line deformation applies to quadrants 1 and 3");
  ContourPath p;
  p.truncation_radius = truncation;
  Side line_side = Side::None;
  if (cut && cut->cut_axis == KeyholeSpec::Axis::Real) {
    if (cut->angular_range != KeyholeSpec::Range::Theta56)
      throw ConfigError("cut", "real-axis cut requires the (-pi, pi] parameterization");
    line_side = quadrant == 1 ? Side::Above : Side::Below;
  }
  Leg line = Leg::segment(-truncation, truncation, line_side);
  if (quadrant == 3) line = line.reversed();
  p.legs.push_back(line);
  if (cut && cut->cut_axis == KeyholeSpec::Axis::Imaginary) {
    double h = cut->half_length;
    if (quadrant == 1) {
      if (cut->angular_range != KeyholeSpec::Range::Theta12)
        throw ConfigError("cut", "quadrant 1 uses the (-pi/2, 3pi/2] parameterization");
      p.legs.push_back(Leg::segment(0.0, I * h, Side::Left));
      p.legs.push_back(Leg::segment(I * h, 0.0, Side::Right));
    } else {
      if (cut->angular_range != KeyholeSpec::Range::Theta34)
        throw ConfigError("cut", "quadrant 3 uses the (-3pi/2, pi/2] parameterization");
      p.legs.push_back(Leg::segment(-I * h, 0.0, Side::Right));
      p.legs.push_back(Leg::segment(0.0, -I * h, Side::Left));
    }
  }
  return p;
}

}  // namespace utm
