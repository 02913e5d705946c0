#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "schwarz/fem.hpp"
#include "schwarz/krylov.hpp"
#include "schwarz/schwarz.hpp"
#include "schwarz/verify.hpp"

namespace schwarz::bench {

enum class Method { mult_mg, add_mg, mult_dd, add_dd };
enum class Accelerator { none, cg, bicgstab };

Method parse_method(std::string_view name);
std::string to_string(Method m);
Accelerator parse_accelerator(std::string_view name);
/// Column heading: UNACCEL, CG, Bi-CGstab.
std::string to_string(Accelerator a);
fem::CoarseMode parse_coarse_mode(std::string_view name);
std::string to_string(fem::CoarseMode m);

struct Problem {
  std::string name;
  std::shared_ptr<const fem::Hierarchy> hierarchy;
  std::shared_ptr<const Decomposition> decomposition;
  Vector rhs;
  Vector reference;  ///< exact discrete solution
  Vector lift;       ///< initial guess: Dirichlet values, zero elsewhere
};

/// "pbe2d", "lshape", or "square" (Laplace on the unit square with a
/// manufactured solution).  The reference is a sparse Cholesky solve.
/// Every run starts from the lift, so the error vanishes on Dirichlet
/// vertices throughout.
Problem build_problem(const std::string& name, std::size_t levels, fem::CoarseMode mode, std::size_t overlap = 1);

/// Sparse direct solve of an SPD system.
Vector direct_solve(const SparseMatrix& a, std::span<const double> f);

struct ExperimentConfig {
  std::string problem = "lshape";
  std::size_t levels = 5;
  fem::CoarseMode coarse_mode = fem::CoarseMode::galerkin;
  Method method = Method::mult_mg;
  MgConfig mg;
  DdConfig dd;
  Accelerator accelerator = Accelerator::none;
  double omega = 0.45;  ///< unaccelerated additive runs
  double tol = 1e-10;
  std::size_t max_iterations = 100;
  std::size_t overlap = 1;

  /// Table coordinates.
  std::string row;
  std::string column;
};

/// Preconditioner action for a configuration; additive methods use
/// cfg.omega when `unaccelerated` and 1 otherwise.
LinearOperator make_preconditioner(const ExperimentConfig& cfg, const Problem& p);

struct TableRow {
  ExperimentConfig config;
  std::optional<SolveReport> report;
  std::string note;  ///< set when the configuration is not applicable or failed

  /// Iteration count, "DIV", ">>N", "BRK" or the note.
  std::string cell() const;
  bool converged() const { return report && report->converged; }
  double work() const { return report ? report->total_work() : 0.0; }
};

TableRow run_experiment(const ExperimentConfig& cfg, const Problem& p);

enum class Format { ascii, csv };

/// Pivot (ascii) or long-format (csv) rendering; rows and columns keep
/// first-appearance order.
std::string emit_table(const std::vector<TableRow>& rows, Format format, const std::string& title = "");

/// Parses one csv record with double-quote escaping.
std::vector<std::string> parse_csv_line(const std::string& line);

// ---------------------------------------------------------------------------
// Table configs

struct TableSpec {
  std::string title;
  std::string problem = "lshape";
  std::size_t levels = 5;
  Method method = Method::mult_mg;
  std::vector<fem::CoarseMode> coarse_modes{fem::CoarseMode::galerkin};
  std::vector<std::string> rows;
  std::vector<DdSweep> sweeps{DdSweep::forw_back};
  std::vector<Accelerator> accelerators{Accelerator::none, Accelerator::cg, Accelerator::bicgstab};
  double omega = 0.45;
  std::size_t overlap = 1;
  double tol = 1e-10;
  std::map<Accelerator, std::size_t> max_iterations;
  std::vector<std::string> checks;
  std::size_t certify_levels = 3;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

TableSpec parse_table_spec(std::istream& in);
TableSpec load_table_spec(const std::filesystem::path& path);

/// Grid in table order.
std::vector<ExperimentConfig> expand(const TableSpec& spec);

/// Builds each problem once and runs the grid.
std::vector<TableRow> run_table(const TableSpec& spec);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Named regime checks listed under `checks`.
std::vector<CheckResult> evaluate_checks(const TableSpec& spec, const std::vector<TableRow>& rows);

struct CertificationRow {
  ExperimentConfig config;
  verify::Checklist checklist;
  std::optional<verify::SpdCertificate> certificate;
  std::string note;
};

/// Condition checklist and SPD certificate per table row, on a hierarchy of
/// spec.certify_levels levels.
std::vector<CertificationRow> certify_table(const TableSpec& spec);
verify::Checklist check_conditions(const ExperimentConfig& cfg, const Problem& p);

}  // namespace schwarz::bench
