#pragma once

// Scenario files: one "dotted.key = value" per line, '#' comments, comma-separated lists.

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "utm/kernel.hpp"
#include "utm/solution.hpp"
#include "utm/step.hpp"
#include "utm/transforms.hpp"

namespace utm {

enum class SolverKind { Auto, Step, General, Well, Oracle };

inline const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Auto: return "auto";
    case SolverKind::Step: return "step";
    case SolverKind::General: return "general";
    case SolverKind::Well: return "well";
    case SolverKind::Oracle: return "oracle";
  }
  return "?";
}

struct Scenario {
  std::vector<double> levels, interfaces;
  std::string initial_kind = "gaussian";  // gaussian | modulated-gaussian | tabulated
  std::vector<double> initial_params;     // center, width[, wavenumber]
  std::string initial_file;
  std::vector<double> xs, ts;
  SolverKind solver = SolverKind::Auto;
  Representation representation = Representation::Quadrant;
  std::optional<double> R, truncation, tilt_imag;
  double tolerance = 1e-10;
  double tilt_real = pi / 8;
  double oracle_L = 20.0, oracle_dx = 0.01, oracle_dt = 1e-3;
  std::vector<double> gammas;   // asymptote rays
  std::vector<int> interface_index;  // interface-map targets, empty for all
  int interface_source = 0;          // interface-map source region, 0 for all
  std::string output_path;

  bool operator==(const Scenario&) const = default;

  PiecewisePotential potential() const { return {levels, interfaces}; }

  InitialCondition initial() const {
    const auto& p = initial_params;
    if (initial_kind == "gaussian") {
      if (p.size() > 2) throw ConfigError("initial.params", "gaussian takes center, width");
      double w = p.size() > 1 ? p[1] : 1.0;
      if (!(w > 0.0)) throw ConfigError("initial.params", "width must be positive");
      return InitialCondition::gaussian(p.empty() ? 0.0 : p[0], w);
    }
    if (initial_kind == "modulated-gaussian") {
      if (p.size() != 3) throw ConfigError("initial.params", "modulated-gaussian takes center, width, wavenumber");
      if (!(p[1] > 0.0)) throw ConfigError("initial.params", "width must be positive");
      return InitialCondition::modulated(p[0], p[1], p[2]);
    }
    if (initial_kind == "tabulated") {
      if (initial_file.empty()) throw ConfigError("initial.file", "tabulated data needs a file");
      return InitialCondition::tabulated(read_table(initial_file));
    }
    throw ConfigError("initial.kind", "unknown kind '" + initial_kind + "'");
  }

  SolverOptions options() const {
    SolverOptions o;
    o.R = R;
    o.truncation = truncation;
    o.tol = tolerance;
    o.tilt_real = tilt_real;
    o.tilt_imag = tilt_imag;
    return o;
  }

  SolverKind resolved_solver() const {
    if (solver != SolverKind::Auto) return solver;
    return interfaces.size() == 1 ? SolverKind::Step : SolverKind::General;
  }

  // arity and consistency checks
  void validate() const {
    PiecewisePotential V = potential();
    SolverKind k = resolved_solver();
    if (k == SolverKind::Step && V.n() != 1) throw ConfigError("solver.kind", "step needs exactly one interface");
    if (k == SolverKind::Well &&
        (V.n() != 2 || V.levels[0] != 0.0 || V.levels[2] != 0.0))
      throw ConfigError("solver.kind", "well needs three levels with zero outer levels");
    if (k == SolverKind::General && V.n() < 1) throw ConfigError("potential.interfaces", "need at least one interface");
    if (!(tolerance > 0.0)) throw ConfigError("numerics.tolerance", "must be positive");
    if (R && !(*R > 0.0)) throw ConfigError("numerics.R", "must be positive");
    if (truncation && !(*truncation > 0.0)) throw ConfigError("numerics.truncation", "must be positive");
    for (double t : ts)
      if (!(t >= 0.0)) throw ConfigError("grid.t", "times must be non-negative");
    initial();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& field, const std::string& s) {
  std::string t = trim(s);
  if (t == "pi") return pi;
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "not a number: '" + t + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError(field, "not a number: '" + t + "'");
  return v;
}

// "a, b, c" or "start:stop:count"
inline std::vector<double> parse_list(const std::string& field, const std::string& s) {
  std::vector<double> out;
  std::string t = trim(s);
  if (t.empty()) return out;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError(field, "range must be start:stop:count");
    double a = parse_number(field, parts[0]), b = parse_number(field, parts[1]);
    double c = parse_number(field, parts[2]);
    if (c < 1 || c != std::floor(c)) throw ConfigError(field, "range count must be a positive integer");
    int n = static_cast<int>(c);
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return out;
  }
  std::stringstream ss(t);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_number(field, p));
  return out;
}

inline std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_num(v[i]);
  return s;
}

}  // namespace detail

inline Scenario parse_config(const std::string& text) {
  using namespace detail;
  Scenario sc;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (kv.count(key)) throw ConfigError(key, "duplicate key");
    kv[key] = val;
  }
  static const std::set<std::string> known = {
      "potential.levels", "potential.interfaces", "initial.kind", "initial.params", "initial.file",
      "grid.x", "grid.t", "solver.kind", "solver.representation", "numerics.R", "numerics.truncation",
      "numerics.tolerance", "numerics.tilt_real", "numerics.tilt_imag", "oracle.L", "oracle.dx", "oracle.dt",
      "asymptote.gamma", "interface.index", "interface.source", "output.path"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw ConfigError(k, "unknown key");
  auto need = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end() || it->second.empty()) throw ConfigError(k, "missing required field");
    return it->second;
  };
  auto opt = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  sc.levels = parse_list("potential.levels", need("potential.levels"));
  if (sc.levels.empty()) throw ConfigError("potential.levels", "missing required field");
  if (auto v = opt("potential.interfaces")) sc.interfaces = parse_list("potential.interfaces", *v);
  sc.initial_kind = need("initial.kind");
  if (auto v = opt("initial.params")) sc.initial_params = parse_list("initial.params", *v);
  if (auto v = opt("initial.file")) sc.initial_file = *v;
  if (auto v = opt("grid.x")) sc.xs = parse_list("grid.x", *v);
  if (auto v = opt("grid.t")) sc.ts = parse_list("grid.t", *v);
  if (auto v = opt("solver.kind")) {
    static const std::map<std::string, SolverKind> m = {{"auto", SolverKind::Auto},
                                                         {"step", SolverKind::Step},
                                                         {"general", SolverKind::General},
                                                         {"well", SolverKind::Well},
                                                         {"oracle", SolverKind::Oracle}};
    auto it = m.find(*v);
    if (it == m.end()) throw ConfigError("solver.kind", "unknown solver '" + *v + "'");
    sc.solver = it->second;
  }
  if (auto v = opt("solver.representation")) {
    if (*v == "d4") sc.representation = Representation::D4;
    else if (*v == "quadrant") sc.representation = Representation::Quadrant;
    else if (*v == "realline") sc.representation = Representation::RealLine;
    else throw ConfigError("solver.representation", "unknown representation '" + *v + "'");
  }
  if (auto v = opt("numerics.R")) sc.R = parse_number("numerics.R", *v);
  if (auto v = opt("numerics.truncation")) sc.truncation = parse_number("numerics.truncation", *v);
  if (auto v = opt("numerics.tolerance")) sc.tolerance = parse_number("numerics.tolerance", *v);
  if (auto v = opt("numerics.tilt_real")) sc.tilt_real = parse_number("numerics.tilt_real", *v);
  if (auto v = opt("numerics.tilt_imag")) sc.tilt_imag = parse_number("numerics.tilt_imag", *v);
  if (auto v = opt("oracle.L")) sc.oracle_L = parse_number("oracle.L", *v);
  if (auto v = opt("oracle.dx")) sc.oracle_dx = parse_number("oracle.dx", *v);
  if (auto v = opt("oracle.dt")) sc.oracle_dt = parse_number("oracle.dt", *v);
  if (auto v = opt("asymptote.gamma")) sc.gammas = parse_list("asymptote.gamma", *v);
  if (auto v = opt("interface.index")) {
    for (double d : parse_list("interface.index", *v)) {
      if (d < 1 || d != std::floor(d)) throw ConfigError("interface.index", "indices are positive integers");
      sc.interface_index.push_back(static_cast<int>(d));
    }
  }
  if (auto v = opt("interface.source")) {
    double d = parse_number("interface.source", *v);
    if (d < 0 || d != std::floor(d) || d > static_cast<double>(sc.levels.size()))
      throw ConfigError("interface.source", "must be a region index or 0");
    sc.interface_source = static_cast<int>(d);
  }
  if (auto v = opt("output.path")) sc.output_path = *v;
  sc.validate();
  return sc;
}

inline Scenario load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// canonical text form; parse_config(dump_config(s)) == s
inline std::string dump_config(const Scenario& s) {
  using namespace detail;
  std::ostringstream os;
  os << "potential.levels = " << fmt_list(s.levels) << "\n";
  if (!s.interfaces.empty()) os << "potential.interfaces = " << fmt_list(s.interfaces) << "\n";
  os << "initial.kind = " << s.initial_kind << "\n";
  if (!s.initial_params.empty()) os << "initial.params = " << fmt_list(s.initial_params) << "\n";
  if (!s.initial_file.empty()) os << "initial.file = " << s.initial_file << "\n";
  if (!s.xs.empty()) os << "grid.x = " << fmt_list(s.xs) << "\n";
  if (!s.ts.empty()) os << "grid.t = " << fmt_list(s.ts) << "\n";
  os << "solver.kind = " << to_string(s.solver) << "\n";
  os << "solver.representation = " << to_string(s.representation) << "\n";
  if (s.R) os << "numerics.R = " << fmt_num(*s.R) << "\n";
  if (s.truncation) os << "numerics.truncation = " << fmt_num(*s.truncation) << "\n";
  os << "numerics.tolerance = " << fmt_num(s.tolerance) << "\n";
  os << "numerics.tilt_real = " << fmt_num(s.tilt_real) << "\n";
  if (s.tilt_imag) os << "numerics.tilt_imag = " << fmt_num(*s.tilt_imag) << "\n";
  os << "oracle.L = " << fmt_num(s.oracle_L) << "\n";
  os << "oracle.dx = " << fmt_num(s.oracle_dx) << "\n";
  os << "oracle.dt = " << fmt_num(s.oracle_dt) << "\n";
  if (!s.gammas.empty()) os << "asymptote.gamma = " << fmt_list(s.gammas) << "\n";
  if (!s.interface_index.empty()) {
    std::vector<double> d(s.interface_index.begin(), s.interface_index.end());
    os << "interface.index = " << fmt_list(d) << "\n";
  }
  if (s.interface_source) os << "interface.source = " << s.interface_source << "\n";
  if (!s.output_path.empty()) os << "output.path = " << s.output_path << "\n";
  return os.str();
}

}  // namespace utm
