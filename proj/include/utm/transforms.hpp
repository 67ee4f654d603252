#pragma once

// Initial data and its finite / half-line Fourier transforms
//   hat psi_0^(j)(k) = int_{x_{j-1}}^{x_j} exp(-i k x) psi_0(x) dx.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "utm/common.hpp"
#include "utm/contours.hpp"
#include "utm/faddeeva.hpp"
#include "utm/kernel.hpp"

namespace utm {

// A exp(-((x-c)/w)^2 + i p x)
struct GaussianTerm {
  cplx A = 1.0;
  double c = 0.0, w = 1.0, p = 0.0;

  cplx value(double x) const {
    double u = (x - c) / w;
    return A * std::exp(cplx(-u * u, p * x));
  }
  cplx derivative(double x) const { return value(x) * cplx(-2.0 * (x - c) / (w * w), p); }

  cplx whole(cplx k) const {
    cplx q = (p - k) * (w / 2);
    return A * w * std::sqrt(pi) * std::exp(I * (p - k) * c - q * q);
  }
  // int_{-inf}^X, valid form for X <= xstar(k)
  cplx below(double X, cplx k) const {
    cplx q = (p - k) * (w / 2);
    double U = (X - c) / w;
    return A * w * (std::sqrt(pi) / 2) * std::exp(I * (p - k) * X - U * U) * faddeeva(-q - I * U);
  }
  // int_X^{inf}, valid form for X >= xstar(k)
  cplx above(double X, cplx k) const {
    cplx q = (p - k) * (w / 2);
    double U = (X - c) / w;
    return A * w * (std::sqrt(pi) / 2) * std::exp(I * (p - k) * X - U * U) * faddeeva(q + I * U);
  }
  double xstar(cplx k) const { return c + k.imag() * w * w / 2; }

  cplx left(double X, cplx k) const {
    return X <= xstar(k) ? below(X, k) : whole(k) - above(X, k);
  }
  cplx right(double X, cplx k) const {
    return X >= xstar(k) ? above(X, k) : whole(k) - below(X, k);
  }
  cplx segment(double a, double b, cplx k) const {
    if (std::isinf(a) && std::isinf(b)) return whole(k);
    if (std::isinf(a)) return left(b, k);
    if (std::isinf(b)) return right(a, k);
    double xs = xstar(k);
    if (b <= xs) return below(b, k) - below(a, k);
    if (a >= xs) return above(a, k) - above(b, k);
    return below(xs, k) - below(a, k) + above(xs, k) - above(b, k);
  }

  // free evolution of this term restricted to [a,b], potential level alpha
  cplx free_evolve(double a, double b, double alpha, double x, double t) const {
    const double w2 = w * w;
    cplx beta = 1.0 / w2 - I / (4.0 * t);
    cplx gam = -I * x / (2.0 * t) + 2.0 * c / w2 + I * p;
    cplx d0 = I * x * x / (4.0 * t) - c * c / w2;
    cplx ys = gam / (2.0 * beta);
    cplx lP = d0 + gam * gam / (4.0 * beta);
    cplx sb = std::sqrt(beta);
    auto term = [&](double y) -> cplx {
      if (std::isinf(y)) return y < 0 ? 2.0 * std::exp(lP) : cplx(0.0);
      cplx z = sb * (y - ys);
      cplx E = I * (x - y) * (x - y) / (4.0 * t) - (y - c) * (y - c) / w2 + I * p * y;
      if (z.real() >= 0) return std::exp(E) * faddeeva(I * z);
      return 2.0 * std::exp(lP) - std::exp(E) * faddeeva(-I * z);
    };
    return A * std::exp(-I * alpha * t) / std::sqrt(4.0 * I * pi * t) * (std::sqrt(pi) / (2.0 * sb)) *
           (term(a) - term(b));
  }
};

// Piecewise cubic Hermite interpolant of sampled data, zero outside the table.
class Table {
 public:
  Table() = default;
  Table(std::vector<double> x, std::vector<cplx> v) : x_(std::move(x)), v_(std::move(v)) {
    if (x_.size() != v_.size()) throw ConfigError("initial.table", "column length mismatch");
    if (x_.size() < 3) throw ConfigError("initial.table", "need at least three samples");
    for (size_t i = 1; i < x_.size(); ++i)
      if (!(x_[i] > x_[i - 1])) throw ConfigError("initial.table", "abscissae must be strictly increasing");
    build();
  }

  const std::vector<double>& x() const { return x_; }
  const std::vector<cplx>& v() const { return v_; }
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

  cplx value(double y) const {
    if (y < lo() || y > hi()) return 0.0;
    size_t i = cell(y);
    double u = y - x_[i];
    const auto& c = coef_[i];
    return ((c[3] * u + c[2]) * u + c[1]) * u + c[0];
  }
  cplx derivative(double y) const {
    if (y < lo() || y > hi()) return 0.0;
    size_t i = cell(y);
    double u = y - x_[i];
    const auto& c = coef_[i];
    return (3.0 * c[3] * u + 2.0 * c[2]) * u + c[1];
  }

  // int_a^b exp(-i k y) P(y) dy over the tabulated support
  cplx transform(double a, double b, cplx k) const {
    a = std::max(a, lo());
    b = std::min(b, hi());
    if (!(b > a)) return 0.0;
    cplx sum = 0.0;
    for (size_t i = cell(a); i + 1 < x_.size() && x_[i] < b; ++i) {
      double ya = std::max(a, x_[i]), yb = std::min(b, x_[i + 1]);
      if (yb > ya) sum += cell_transform(i, ya, yb, k);
    }
    return sum;
  }

  // int_a^b G(x-y,t) P(y) dy with the free propagator of level alpha
  IntegralResult free_evolve(double a, double b, double alpha, double x, double t, double tol) const {
    a = std::max(a, lo());
    b = std::min(b, hi());
    IntegralResult r;
    if (!(b > a)) return r;
    cplx pref = std::exp(-I * alpha * t) / std::sqrt(4.0 * I * pi * t);
    ContourPath path;
    for (size_t i = cell(a); i + 1 < x_.size() && x_[i] < b; ++i) {
      double ya = std::max(a, x_[i]), yb = std::min(b, x_[i + 1]);
      if (yb > ya) path.legs.push_back(Leg::segment(ya, yb));
    }
    auto f = [&](cplx y) {
      double yr = y.real();
      return pref * std::exp(I * (x - yr) * (x - yr) / (4.0 * t)) * value(yr);
    };
    QuadOptions o;
    o.tol = tol;
    o.min_split = 1;
    o.probe_points = 16;
    return integrate(path, f, o);
  }

 private:
  std::vector<double> x_;
  std::vector<cplx> v_;
  std::vector<std::array<cplx, 4>> coef_;

  size_t cell(double y) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), y);
    size_t i = it == x_.begin() ? 0 : static_cast<size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
  }

  void build() {
    size_t n = x_.size();
    std::vector<cplx> d(n);
    for (size_t i = 0; i < n; ++i) {
      if (i == 0)
        d[i] = (v_[1] - v_[0]) / (x_[1] - x_[0]);
      else if (i == n - 1)
        d[i] = (v_[n - 1] - v_[n - 2]) / (x_[n - 1] - x_[n - 2]);
      else {
        double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        d[i] = (v_[i + 1] - v_[i]) / h1 * (h0 / (h0 + h1)) + (v_[i] - v_[i - 1]) / h0 * (h1 / (h0 + h1));
      }
    }
    coef_.resize(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
      double h = x_[i + 1] - x_[i];
      cplx dv = (v_[i + 1] - v_[i]) / h;
      coef_[i] = {v_[i], d[i], (3.0 * dv - 2.0 * d[i] - d[i + 1]) / h, (d[i] + d[i + 1] - 2.0 * dv) / (h * h)};
    }
  }

  cplx cell_transform(size_t i, double ya, double yb, cplx k) const {
    // re-expand the cubic about ya
    const auto& c = coef_[i];
    double u0 = ya - x_[i];
    std::array<cplx, 4> q = {((c[3] * u0 + c[2]) * u0 + c[1]) * u0 + c[0],
                             (3.0 * c[3] * u0 + 2.0 * c[2]) * u0 + c[1], 3.0 * c[3] * u0 + c[2], c[3]};
    double h = yb - ya;
    cplx s = -I * k;
    std::array<cplx, 4> E;
    if (std::abs(s * h) <= 1.5) {
      cplx ea = std::exp(s * ya);
      for (int m = 0; m < 4; ++m) {
        double hm = std::pow(h, m + 1);
        cplx sh = s * h, pw = 1.0, acc = hm / (m + 1.0);
        double fact = 1.0;
        for (int nn = 1; nn < 60; ++nn) {
          pw *= sh;
          fact *= nn;
          cplx t = pw / fact * hm / double(nn + m + 1);
          acc += t;
          if (std::abs(t) < 1e-18 * std::abs(acc)) break;
        }
        E[m] = ea * acc;
      }
    } else {
      cplx ea = std::exp(s * ya), eb = std::exp(s * yb);
      E[0] = (eb - ea) / s;
      for (int m = 1; m < 4; ++m) E[m] = (std::pow(h, m) * eb - double(m) * E[m - 1]) / s;
    }
    return q[0] * E[0] + q[1] * E[1] + q[2] * E[2] + q[3] * E[3];
  }
};

struct InitialCondition {
  enum class Kind { Gaussian, ModulatedGaussian, Tabulated };
  Kind kind = Kind::Gaussian;
  std::vector<GaussianTerm> terms;
  Table table;

  static InitialCondition gaussian(double c = 0.0, double w = 1.0, cplx A = 1.0) {
    InitialCondition ic;
    ic.terms.push_back({A, c, w, 0.0});
    return ic;
  }
  static InitialCondition modulated(double c, double w, double p, cplx A = 1.0) {
    InitialCondition ic;
    ic.kind = Kind::ModulatedGaussian;
    ic.terms.push_back({A, c, w, p});
    return ic;
  }
  static InitialCondition tabulated(Table t) {
    InitialCondition ic;
    ic.kind = Kind::Tabulated;
    ic.table = std::move(t);
    return ic;
  }

  cplx value(double x) const {
    if (kind == Kind::Tabulated) return table.value(x);
    cplx s = 0.0;
    for (const auto& g : terms) s += g.value(x);
    return s;
  }
  cplx derivative(double x) const {
    if (kind == Kind::Tabulated) return table.derivative(x);
    cplx s = 0.0;
    for (const auto& g : terms) s += g.derivative(x);
    return s;
  }
  cplx transform(double a, double b, cplx k) const {
    if (kind == Kind::Tabulated) return table.transform(a, b, k);
    cplx s = 0.0;
    for (const auto& g : terms) s += g.segment(a, b, k);
    return s;
  }
  // largest Gaussian width; zero when the data carry no Gaussian decay in k
  double spectral_width() const {
    double w = 0.0;
    if (kind != Kind::Tabulated)
      for (const auto& g : terms) w = std::max(w, g.w);
    return w;
  }
  // L1 norm over [a,b], used for the real-k transform bound
  double l1(double a, double b) const {
    if (kind == Kind::Tabulated) {
      a = std::max(a, table.lo());
      b = std::min(b, table.hi());
    } else {
      double lo = 1e300, hi = -1e300;
      for (const auto& g : terms) {
        lo = std::min(lo, g.c - 40 * g.w);
        hi = std::max(hi, g.c + 40 * g.w);
      }
      a = std::max(a, lo);
      b = std::min(b, hi);
    }
    if (!(b > a)) return 0.0;
    ContourPath p;
    p.legs.push_back(Leg::segment(a, b));
    QuadOptions o;
    o.tol = 1e-12;
    return integrate(p, [&](cplx y) { return cplx(std::abs(value(y.real()))); }, o).value.real();
  }
};

struct TransformValue {
  int region = 0;
  cplx k{};
  cplx value{};
  double error = 0.0;
};

// Transform of the data restricted to region j.  With strict checking the unbounded
// regions only accept their convergent half-planes.
inline TransformValue hat_psi0(int j, const PiecewisePotential& V, const InitialCondition& ic, cplx k,
                               bool strict = true) {
  if (j < 1 || j > V.n() + 1) throw DomainError("region index out of range");
  if (strict) {
    if (j == 1 && k.imag() < 0.0)
      throw DomainError("left-unbounded region needs Im k >= 0, got k=" + fmt_c(k));
    if (j == V.n() + 1 && k.imag() > 0.0)
      throw DomainError("right-unbounded region needs Im k <= 0, got k=" + fmt_c(k));
  }
  cplx v = ic.transform(V.left_end(j), V.right_end(j), k);
  return {j, k, v, 64.0 * eps * std::abs(v)};
}

// Per-problem transform evaluator with a bit-exact memo.
class Transformer {
 public:
  Transformer(PiecewisePotential V, InitialCondition ic, bool cache = true)
      : V_(std::move(V)), ic_(std::move(ic)), use_cache_(cache) {}

  const PiecewisePotential& potential() const { return V_; }
  const InitialCondition& data() const { return ic_; }

  // transforms are entire for the supported data, so solvers evaluate them off the
  // convergent half-planes when a contour leans across
  cplx operator()(int j, cplx k) const {
    if (!use_cache_) return ic_.transform(V_.left_end(j), V_.right_end(j), k);
    Key key{j, bits(k.real()), bits(k.imag())};
    {
      std::shared_lock lk(mu_);
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    cplx v = ic_.transform(V_.left_end(j), V_.right_end(j), k);
    std::unique_lock lk(mu_);
    if (memo_.size() > 2000000) memo_.clear();
    memo_.emplace(key, v);
    return v;
  }

  size_t cache_size() const {
    std::shared_lock lk(mu_);
    return memo_.size();
  }

  // free evolution of the data restricted to region j
  IntegralResult free_term(int j, double x, double t, double tol) const {
    double a = V_.left_end(j), b = V_.right_end(j), al = V_.level(j);
    if (ic_.kind == InitialCondition::Kind::Tabulated) return ic_.table.free_evolve(a, b, al, x, t, tol);
    IntegralResult r;
    for (const auto& g : ic_.terms) r.value += g.free_evolve(a, b, al, x, t);
    r.roundoff = r.error = 1e3 * eps * std::max(1.0, std::abs(r.value));
    return r;
  }

  // x-derivative of free_term by a fourth-order central difference
  IntegralResult free_term_dx(int j, double x, double t, double tol) const {
    const double h = 1e-3 * std::max(1.0, std::sqrt(t));
    const double c[4] = {1.0 / 12, -2.0 / 3, 2.0 / 3, -1.0 / 12};
    const double o[4] = {-2, -1, 1, 2};
    IntegralResult r;
    double err = 0.0;
    for (int i = 0; i < 4; ++i) {
      IntegralResult f = free_term(j, x + o[i] * h, t, tol);
      r.value += c[i] * f.value / h;
      err += std::abs(c[i]) * f.error / h;
    }
    r.roundoff = r.error = err + 1e-12;
    return r;
  }

 private:
  struct Key {
    int j;
    uint64_t re, im;
    bool operator==(const Key&) const = default;
  };
  struct Hash {
    size_t operator()(const Key& k) const {
      uint64_t h = k.re * 0x9E3779B97F4A7C15ULL ^ (k.im + 0x632BE59BD9B4E019ULL + (h0(k.j) << 6));
      return static_cast<size_t>(h ^ (h >> 29));
    }
    static uint64_t h0(int j) { return static_cast<uint64_t>(j) * 0xBF58476D1CE4E5B9ULL; }
  };
  static uint64_t bits(double d) {
    uint64_t u;
    std::memcpy(&u, &d, sizeof u);
    return u;
  }

  PiecewisePotential V_;
  InitialCondition ic_;
  bool use_cache_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<Key, cplx, Hash> memo_;
};

// Two-column (x, value) or three-column (x, re, im) text; '#' starts a comment.
inline Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("initial.file", "cannot open " + path);
  std::vector<double> xs;
  std::vector<cplx> vs;
  std::string line;
  int cols = 0, lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ss(line);
    std::vector<double> row;
    double d;
    while (ss >> d) row.push_back(d);
    if (!ss.eof()) throw ConfigError("initial.file", "unparsable line " + std::to_string(lineno));
    if (row.empty()) continue;
    if (cols == 0) cols = static_cast<int>(row.size());
    if (static_cast<int>(row.size()) != cols || (cols != 2 && cols != 3))
      throw ConfigError("initial.file", "line " + std::to_string(lineno) + " needs 2 or 3 columns consistently");
    xs.push_back(row[0]);
    vs.push_back(cols == 2 ? cplx(row[1], 0.0) : cplx(row[1], row[2]));
  }
  return Table(std::move(xs), std::move(vs));
}

}  // namespace utm
