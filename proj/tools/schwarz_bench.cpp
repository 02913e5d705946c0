// Benchmark harness: runs table grids, certifies preconditioners, exports problems.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "schwarz/bench.hpp"

using namespace schwarz;
using namespace schwarz::bench;

namespace {

std::string flag(bool ok) { return ok ? "PASS" : "FAIL"; }

bool print_checks(const std::vector<CheckResult>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    std::cout << flag(c.passed) << "  " << c.name << "  [" << c.detail << "]\n";
    all = all && c.passed;
  }
  return all;
}

void print_certification(const std::vector<CertificationRow>& rows) {
  std::cout << "\ncertification (" << rows.size() << " configurations)\n";
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(24) << (r.config.row + " / " + r.config.column) << std::right;
    if (!r.note.empty()) {
      std::cout << "  " << r.note << '\n';
      continue;
    }
    std::cout << "  conditions " << flag(r.checklist.passed());
    if (r.certificate)
      std::cout << "  spd " << flag(r.certificate->passed) << "  asym " << std::scientific << std::setprecision(2)
                << r.certificate->symmetry_defect << "  min_eig " << r.certificate->min_eig << std::defaultfloat;
    std::cout << '\n';
    for (const auto& c : r.checklist.conditions)
      if (!c.passed) std::cout << "    unmet: " << c.name << " (" << c.value << ")\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schwarz preconditioner benchmark harness"};
  app.require_subcommand(1);

  std::string config;
  std::string format = "ascii";
  bool certify = false;
  auto* run = app.add_subcommand("run", "run a table grid and its regime checks");
  run->add_option("--config", config, "table config file")->required()->check(CLI::ExistingFile);
  run->add_option("--format", format, "ascii or csv")->check(CLI::IsMember({"ascii", "csv"}));
  run->add_flag("--certify", certify, "also run condition checks and SPD certification");

  auto* cert = app.add_subcommand("certify", "condition checks and SPD certification only");
  cert->add_option("--config", config, "table config file")->required()->check(CLI::ExistingFile);

  std::string problem = "lshape", mode = "galerkin", out_dir = "export";
  std::size_t levels = 3;
  auto* exp = app.add_subcommand("export", "write a problem hierarchy as MatrixMarket files");
  exp->add_option("--problem", problem, "pbe2d, lshape or square");
  exp->add_option("--levels", levels, "number of levels");
  exp->add_option("--coarse-mode", mode, "galerkin or discretized");
  exp->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exp) {
      auto p = build_problem(problem, levels, parse_coarse_mode(mode));
      fem::export_hierarchy(*p.hierarchy, out_dir);
      std::cout << "wrote " << p.hierarchy->depth() << " levels, n = " << p.hierarchy->size() << " to " << out_dir
                << '\n';
      return 0;
    }
    const TableSpec spec = load_table_spec(config);
    if (*cert) {
      auto rows = certify_table(spec);
      std::cout << spec.title << '\n';
      print_certification(rows);
      return 0;
    }
    const auto start = std::chrono::steady_clock::now();
    const auto rows = run_table(spec);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Format fmt = format == "csv" ? Format::csv : Format::ascii;
    std::cout << emit_table(rows, fmt, fmt == Format::ascii ? spec.title : "");
    if (fmt == Format::csv) return print_checks(evaluate_checks(spec, rows)) ? 0 : 1;
    for (const auto& r : rows)
      if (r.note.rfind("ERR", 0) == 0) std::cout << r.config.row << " / " << r.config.column << ": " << r.note << '\n';
    std::cout << "\n" << rows.size() << " runs in " << std::fixed << std::setprecision(1) << seconds << " s\n"
              << std::defaultfloat;
    const bool ok = print_checks(evaluate_checks(spec, rows));
    if (certify) print_certification(certify_table(spec));
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
