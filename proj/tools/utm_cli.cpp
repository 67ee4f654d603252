// Command-line front end: solve, compare, asymptote and interface-map over scenario files.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "utm/run.hpp"

namespace {

int report(const std::string& kind, const std::string& field, const std::string& message, int code) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << '\n';
  return code;
}

template <class Writer>
void emit(const std::string& path, Writer&& w) {
  if (path.empty() || path == "-") {
    w(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw utm::ConfigError("output.path", "cannot write " + path);
  w(out);
}

std::string trace_path(const std::string& base, int j) {
  if (base.empty() || base == "-") return base;
  auto dot = base.rfind('.');
  auto slash = base.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return base + ".iface" + std::to_string(j);
  return base.substr(0, dot) + ".iface" + std::to_string(j) + base.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise-constant potential Schroedinger solver"};
  app.require_subcommand(1);
  app.fallthrough();
  bool echo = false;
  app.add_flag("--echo", echo, "print the parsed scenario in canonical form and exit");
  std::string cfg, cfg_b, out_override;
  app.add_option("-o,--output", out_override, "output path, overriding output.path");

  auto* solve = app.add_subcommand("solve", "evaluate the solution on the scenario grid");
  solve->add_option("config", cfg, "scenario file")->required();
  auto* compare = app.add_subcommand("compare", "evaluate two scenarios and report the discrepancy");
  compare->add_option("config_a", cfg, "first scenario")->required();
  compare->add_option("config_b", cfg_b, "second scenario")->required();
  auto* asym = app.add_subcommand("asymptote", "stationary-phase leading order along rays x = gamma t");
  asym->add_option("config", cfg, "scenario file")->required();
  auto* imap = app.add_subcommand("interface-map", "interface traces of psi and psi_x from the data");
  imap->add_option("config", cfg, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    utm::Scenario sc = utm::load_config(cfg);
    if (echo) {
      std::cout << utm::dump_config(sc);
      return 0;
    }
    std::string path = out_override.empty() ? sc.output_path : out_override;
    int threads = utm::thread_count();
    if (solve->parsed()) {
      auto rows = utm::run_solve(sc, threads);
      emit(path, [&](std::ostream& os) { utm::write_table(os, rows); });
    } else if (compare->parsed()) {
      utm::Scenario sb = utm::load_config(cfg_b);
      auto c = utm::run_compare(sc, sb, threads);
      emit(path, [&](std::ostream& os) { utm::write_comparison(os, c); });
      std::cerr << "max_discrepancy=" << utm::fmt_g(c.max) << " rms_discrepancy=" << utm::fmt_g(c.rms) << '\n';
    } else if (asym->parsed()) {
      auto rows = utm::run_asymptote(sc);
      emit(path, [&](std::ostream& os) { utm::write_table(os, rows); });
    } else if (imap->parsed()) {
      auto rows = utm::run_interface_map(sc, threads);
      std::vector<int> js;
      for (const auto& r : rows)
        if (std::find(js.begin(), js.end(), r.j) == js.end()) js.push_back(r.j);
      for (int j : js) {
        if (path.empty() || path == "-") std::cout << "# interface " << j << '\n';
        emit(trace_path(path, j), [&](std::ostream& os) { utm::write_trace(os, rows, j); });
      }
    }
  } catch (const utm::ConfigError& e) {
    return report("config", e.field, e.what(), 2);
  } catch (const utm::Error& e) {
    return report("solver", "", e.what(), 3);
  } catch (const std::exception& e) {
    return report("internal", "", e.what(), 4);
  }
  return 0;
}
