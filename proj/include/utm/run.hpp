#pragma once

// Scenario execution and table output shared by the command-line tool and the tests.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "utm/asymptotics.hpp"
#include "utm/config.hpp"
#include "utm/general.hpp"
#include "utm/oracle.hpp"
#include "utm/step.hpp"
#include "utm/well.hpp"

namespace utm {

// worker count from UTM_THREADS, else the hardware concurrency
inline int thread_count() {
  if (const char* e = std::getenv("UTM_THREADS")) {
    int n = std::atoi(e);
    if (n >= 1) return n;
    throw ConfigError("UTM_THREADS", "must be a positive integer");
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

// runs f(i) for i in [0, n) on the given number of workers; the first exception is rethrown
inline void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  threads = std::max(1, std::min(threads, n));
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto work = [&] {
    for (int i; (i = next++) < n;) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lk(mu);
        if (!err) err = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

inline std::vector<SolutionSample> run_oracle(const Scenario& sc) {
  PiecewisePotential V = sc.potential();
  FDGrid g = FDGrid::aligned(V, sc.oracle_L, sc.oracle_dx, sc.oracle_dt);
  CrankNicolson cn(V, sc.initial(), g);
  std::vector<double> ts = sc.ts;
  std::sort(ts.begin(), ts.end());
  std::vector<SolutionSample> out(sc.xs.size() * sc.ts.size());
  for (double t : ts) {
    cn.run(t);
    for (size_t it = 0; it < sc.ts.size(); ++it) {
      if (sc.ts[it] != t) continue;
      for (size_t ix = 0; ix < sc.xs.size(); ++ix)
        out[it * sc.xs.size() + ix] = {sc.xs[ix], t, cn.field().at(sc.xs[ix]), std::numeric_limits<double>::quiet_NaN()};
    }
  }
  return out;
}

// samples ordered t-major, x-minor
inline std::vector<SolutionSample> run_solve(const Scenario& sc, int threads = thread_count()) {
  if (sc.xs.empty()) throw ConfigError("grid.x", "missing required field");
  if (sc.ts.empty()) throw ConfigError("grid.t", "missing required field");
  SolverKind kind = sc.resolved_solver();
  if (kind == SolverKind::Oracle) return run_oracle(sc);
  PiecewisePotential V = sc.potential();
  InitialCondition ic = sc.initial();
  SolverOptions opt = sc.options();
  std::function<SolutionSample(double, double)> eval;
  if (kind == SolverKind::Step) {
    auto P = std::make_shared<StepProblem>(StepProblem{V.levels[0], V.levels[1], ic, sc.representation});
    auto T = std::make_shared<Transformer>(V, ic);
    eval = [P, T, opt](double x, double t) { return evaluate_step(*P, *T, x, t, opt); };
  } else if (kind == SolverKind::Well) {
    WellProblem wp{V.levels[1], V.interfaces[1], ic, sc.representation};
    auto W = std::make_shared<WellSolver>(wp, opt);
    eval = [W](double x, double t) { return W->evaluate(x, t); };
  } else {
    auto G = std::make_shared<GeneralSolver>(V, ic, opt);
    eval = [G](double x, double t) { return G->evaluate(x, t); };
  }
  const size_t nx = sc.xs.size();
  std::vector<SolutionSample> out(nx * sc.ts.size());
  parallel_for(static_cast<int>(out.size()), threads, [&](int i) {
    out[i] = eval(sc.xs[i % nx], sc.ts[i / nx]);
  });
  return out;
}

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_table(std::ostream& os, const std::vector<SolutionSample>& rows) {
  os << "x,t,re_psi,im_psi,abs_psi,err_estimate\n";
  for (const auto& r : rows)
    os << fmt_g(r.x) << ',' << fmt_g(r.t) << ',' << fmt_g(r.psi.real()) << ',' << fmt_g(r.psi.imag()) << ','
       << fmt_g(std::abs(r.psi)) << ',' << fmt_g(r.error) << '\n';
}

struct Comparison {
  std::vector<SolutionSample> a, b;
  std::vector<double> discrepancy;
  double max = 0.0, rms = 0.0;
};

inline Comparison run_compare(const Scenario& A, const Scenario& B, int threads = thread_count()) {
  if (A.xs != B.xs) throw ConfigError("grid.x", "compared scenarios must share the x grid");
  if (A.ts != B.ts) throw ConfigError("grid.t", "compared scenarios must share the t grid");
  Comparison c;
  c.a = run_solve(A, threads);
  c.b = run_solve(B, threads);
  double ss = 0.0;
  for (size_t i = 0; i < c.a.size(); ++i) {
    double d = std::abs(c.a[i].psi - c.b[i].psi);
    c.discrepancy.push_back(d);
    c.max = std::max(c.max, d);
    ss += d * d;
  }
  c.rms = c.a.empty() ? 0.0 : std::sqrt(ss / c.a.size());
  return c;
}

inline void write_comparison(std::ostream& os, const Comparison& c) {
  os << "x,t,re_psi,im_psi,abs_psi,err_estimate,re_psi_b,im_psi_b,discrepancy\n";
  for (size_t i = 0; i < c.a.size(); ++i) {
    const auto& r = c.a[i];
    os << fmt_g(r.x) << ',' << fmt_g(r.t) << ',' << fmt_g(r.psi.real()) << ',' << fmt_g(r.psi.imag()) << ','
       << fmt_g(std::abs(r.psi)) << ',' << fmt_g(r.error) << ',' << fmt_g(c.b[i].psi.real()) << ','
       << fmt_g(c.b[i].psi.imag()) << ',' << fmt_g(c.discrepancy[i]) << '\n';
  }
  os << "# summary max_discrepancy=" << fmt_g(c.max) << " rms_discrepancy=" << fmt_g(c.rms) << '\n';
}

// leading-order values along each ray at every grid time; x = gamma t
inline std::vector<SolutionSample> run_asymptote(const Scenario& sc) {
  PiecewisePotential V = sc.potential();
  if (V.n() != 1) throw ConfigError("potential.interfaces", "asymptotics need a single step");
  if (sc.gammas.empty()) throw ConfigError("asymptote.gamma", "missing required field");
  if (sc.ts.empty()) throw ConfigError("grid.t", "missing required field");
  Transformer T(V, sc.initial());
  std::vector<SolutionSample> out;
  for (double g : sc.gammas)
    for (double t : sc.ts)
      out.push_back({g * t, t, leading_order_step(V.levels[0], V.levels[1], T, RaySpec{g}, t),
                     std::numeric_limits<double>::quiet_NaN()});
  return out;
}

struct TraceSample {
  int j = 0;
  double t = 0.0;
  cplx psi{}, psi_x{};
  double error = 0.0;
};

inline std::vector<TraceSample> run_interface_map(const Scenario& sc, int threads = thread_count()) {
  if (sc.ts.empty()) throw ConfigError("grid.t", "missing required field");
  GeneralSolver G(sc.potential(), sc.initial(), sc.options());
  std::vector<int> js = sc.interface_index;
  if (js.empty())
    for (int j = 1; j <= G.potential().n(); ++j) js.push_back(j);
  for (int j : js)
    if (j > G.potential().n()) throw ConfigError("interface.index", "index beyond the last interface");
  std::vector<TraceSample> out(js.size() * sc.ts.size());
  const size_t nt = sc.ts.size();
  parallel_for(static_cast<int>(out.size()), threads, [&](int i) {
    int j = js[i / nt];
    double t = sc.ts[i % nt];
    TraceSample s{j, t};
    if (t == 0.0 && sc.interface_source == 0) {
      double xj = G.potential().interfaces[j - 1];
      s.psi = G.transformer().data().value(xj);
      s.psi_x = G.transformer().data().derivative(xj);
    } else {
      InterfaceValues v = G.interface_values(j, t, sc.interface_source);
      s.psi = v.psi, s.psi_x = v.psi_x, s.error = v.error_psi + v.error_psi_x;
    }
    out[i] = s;
  });
  return out;
}

inline void write_trace(std::ostream& os, const std::vector<TraceSample>& rows, int j) {
  os << "t,re_psi,im_psi,re_psi_x,im_psi_x,err_estimate\n";
  for (const auto& r : rows)
    if (r.j == j)
      os << fmt_g(r.t) << ',' << fmt_g(r.psi.real()) << ',' << fmt_g(r.psi.imag()) << ',' << fmt_g(r.psi_x.real())
         << ',' << fmt_g(r.psi_x.imag()) << ',' << fmt_g(r.error) << '\n';
}

}  // namespace utm
