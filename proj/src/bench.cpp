#include "schwarz/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "schwarz/problems.hpp"

namespace schwarz::bench {

Method parse_method(std::string_view name) {
  if (name == "mult_mg") return Method::mult_mg;
  if (name == "add_mg") return Method::add_mg;
  if (name == "mult_dd") return Method::mult_dd;
  if (name == "add_dd") return Method::add_dd;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::mult_mg: return "mult_mg";
    case Method::add_mg: return "add_mg";
    case Method::mult_dd: return "mult_dd";
    case Method::add_dd: return "add_dd";
  }
  return "?";
}

Accelerator parse_accelerator(std::string_view name) {
  if (name == "none" || name == "unaccel") return Accelerator::none;
  if (name == "cg") return Accelerator::cg;
  if (name == "bicgstab") return Accelerator::bicgstab;
  throw ConfigError("unknown accelerator '" + std::string(name) + "'");
}

std::string to_string(Accelerator a) {
  switch (a) {
    case Accelerator::none: return "UNACCEL";
    case Accelerator::cg: return "CG";
    case Accelerator::bicgstab: return "Bi-CGstab";
  }
  return "?";
}

fem::CoarseMode parse_coarse_mode(std::string_view name) {
  if (name == "galerkin") return fem::CoarseMode::galerkin;
  if (name == "discretized") return fem::CoarseMode::discretized;
  throw ConfigError("unknown coarse mode '" + std::string(name) + "'");
}

std::string to_string(fem::CoarseMode m) { return m == fem::CoarseMode::galerkin ? "galerkin" : "discretized"; }

// ---------------------------------------------------------------------------

Vector direct_solve(const SparseMatrix& a, std::span<const double> f) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(a.nnz());
  for (const auto& e : a.triplets())
    t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  m.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw NotSpdError("direct_solve: factorization failed");
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
  Eigen::VectorXd x = ldlt.solve(rhs);
  // one step of iterative refinement
  Eigen::VectorXd r = rhs - m * x;
  x += ldlt.solve(r);
  return Vector(x.data(), x.data() + x.size());
}

Problem build_problem(const std::string& name, std::size_t levels, fem::CoarseMode mode, std::size_t overlap) {
  Problem p;
  p.name = name;
  fem::Hierarchy h;
  if (name == "pbe2d") {
    h = fem::build_hierarchy(problems::pbe_problem(), problems::pbe_mesh(), levels, mode);
  } else if (name == "lshape") {
    h = fem::build_hierarchy(problems::lshape_problem(), problems::lshape_mesh(), levels, mode);
  } else if (name == "square") {
    h = fem::build_hierarchy(problems::laplace_problem(), problems::unit_square_mesh(3), levels, mode);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector u(h.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = h.finest().mesh.dirichlet[i] ? 0.0 : dist(rng);
    h.rhs = spmv(h.fine_matrix(), u);
  } else {
    throw ConfigError("unknown problem '" + name + "'");
  }
  p.rhs = h.rhs;
  p.reference = direct_solve(h.fine_matrix(), p.rhs);
  p.lift.assign(p.rhs.size(), 0.0);
  for (std::size_t i = 0; i < p.lift.size(); ++i)
    if (h.finest().mesh.dirichlet[i]) p.lift[i] = p.rhs[i];
  p.hierarchy = std::make_shared<const fem::Hierarchy>(std::move(h));
  p.decomposition = std::make_shared<const Decomposition>(build_decomposition(*p.hierarchy, overlap));
  return p;
}

LinearOperator make_preconditioner(const ExperimentConfig& cfg, const Problem& p) {
  const bool unaccelerated = cfg.accelerator == Accelerator::none;
  switch (cfg.method) {
    case Method::mult_mg:
      return as_operator(std::make_shared<const MultiplicativeMultigrid>(p.hierarchy, cfg.mg));
    case Method::add_mg: {
      MgConfig mg = cfg.mg;
      mg.omega = unaccelerated ? cfg.omega : 1.0;
      return as_operator(std::make_shared<const AdditiveMultigrid>(p.hierarchy, mg));
    }
    case Method::mult_dd:
      return as_operator(std::make_shared<const MultiplicativeDd>(p.decomposition, cfg.dd));
    case Method::add_dd: {
      DdConfig dd = cfg.dd;
      dd.omega = unaccelerated ? cfg.omega : 1.0;
      return as_operator(std::make_shared<const AdditiveDd>(p.decomposition, dd));
    }
  }
  throw ConfigError("unknown method");
}

namespace {

/// The adjointed subdomain solver needs a second subdomain pass.
bool applicable(const ExperimentConfig& cfg) {
  if (cfg.dd.solver != SubdomainSolverKind::adjointed) return true;
  return cfg.method == Method::mult_dd && cfg.dd.sweep != DdSweep::forw;
}

}  // namespace

std::string TableRow::cell() const {
  if (!report) return note.empty() ? "--" : note;
  switch (report->reason) {
    case StopReason::tolerance: return std::to_string(report->iterations);
    case StopReason::divergence: return "DIV";
    case StopReason::max_iterations: return ">>" + std::to_string(config.max_iterations);
    case StopReason::breakdown: return "BRK";
  }
  return "?";
}

TableRow run_experiment(const ExperimentConfig& cfg, const Problem& p) {
  TableRow row;
  row.config = cfg;
  if (!applicable(cfg)) {
    row.note = "--";
    return row;
  }
  try {
    const auto& a = p.hierarchy->fine_matrix();
    LinearOperator b = make_preconditioner(cfg, p);
    // solve for the correction u - lift
    Vector f = subtract(p.rhs, spmv(a, p.lift));
    auto rule = StoppingRule::a_norm(subtract(p.reference, p.lift), cfg.max_iterations, cfg.tol);
    SolveReport rep;
    switch (cfg.accelerator) {
      case Accelerator::none: {
        const bool native = cfg.method == Method::mult_mg || cfg.method == Method::mult_dd;
        rep = stationary_solve(a, b, f, 1.0, rule, native ? StationaryForm::native : StationaryForm::correction);
        break;
      }
      case Accelerator::cg: rep = pcg_solve(a, b, f, rule); break;
      case Accelerator::bicgstab: rep = bicgstab_solve(a, b, f, rule); break;
    }
    rep.method = to_string(cfg.method) + "/" + to_string(cfg.accelerator);
    rep.solution.clear();
    row.report = std::move(rep);
  } catch (const std::exception& e) {
    row.note = std::string("ERR: ") + e.what();
  }
  return row;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class Key>
std::vector<Key> ordered_unique(const std::vector<TableRow>& rows, Key (*key)(const TableRow&)) {
  std::vector<Key> out;
  for (const auto& r : rows) {
    Key k = key(r);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

std::string row_key(const TableRow& r) { return r.config.row; }
std::string column_key(const TableRow& r) { return r.config.column; }

}  // namespace

std::string emit_table(const std::vector<TableRow>& rows, Format format, const std::string& title) {
  std::ostringstream out;
  if (format == Format::csv) {
    out << "row,column,problem,levels,coarse_mode,method,accelerator,iterations,reason,cell,work\n";
    for (const auto& r : rows) {
      const auto& c = r.config;
      out << csv_field(c.row) << ',' << csv_field(c.column) << ',' << c.problem << ',' << c.levels << ','
          << to_string(c.coarse_mode) << ',' << to_string(c.method) << ',' << to_string(c.accelerator) << ','
          << (r.report ? std::to_string(r.report->iterations) : "") << ','
          << (r.report ? to_string(r.report->reason) : "") << ',' << csv_field(r.cell()) << ','
          << std::setprecision(6) << r.work() << '\n';
    }
    return out.str();
  }

  auto row_labels = ordered_unique<std::string>(rows, row_key);
  auto col_labels = ordered_unique<std::string>(rows, column_key);
  std::vector<std::vector<std::string>> grid(row_labels.size(), std::vector<std::string>(col_labels.size()));
  for (const auto& r : rows) {
    auto i = std::find(row_labels.begin(), row_labels.end(), r.config.row) - row_labels.begin();
    auto j = std::find(col_labels.begin(), col_labels.end(), r.config.column) - col_labels.begin();
    grid[i][j] = r.cell();
  }
  std::size_t w0 = 4;
  for (const auto& s : row_labels) w0 = std::max(w0, s.size());
  std::vector<std::size_t> w(col_labels.size());
  for (std::size_t j = 0; j < col_labels.size(); ++j) {
    w[j] = col_labels[j].size();
    for (const auto& g : grid) w[j] = std::max(w[j], g[j].size());
  }
  if (!title.empty()) out << title << '\n';
  out << std::left << std::setw(static_cast<int>(w0)) << "row";
  for (std::size_t j = 0; j < col_labels.size(); ++j) out << " | " << std::right << std::setw(static_cast<int>(w[j])) << col_labels[j];
  out << '\n';
  std::size_t total = w0;
  for (auto x : w) total += x + 3;
  out << std::string(total, '-') << '\n';
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    out << std::left << std::setw(static_cast<int>(w0)) << row_labels[i];
    for (std::size_t j = 0; j < col_labels.size(); ++j)
      out << " | " << std::right << std::setw(static_cast<int>(w[j])) << grid[i][j];
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    auto x = std::stoul(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::string column_label(Accelerator a, fem::CoarseMode m, bool both_modes) {
  std::string s = to_string(a);
  if (both_modes && m == fem::CoarseMode::discretized) s += " (disc)";
  return s;
}

std::string sweep_label(DdSweep s, fem::CoarseMode m, bool both_modes) {
  std::string out = to_string(s);
  if (both_modes && m == fem::CoarseMode::discretized) out += " (disc)";
  return out;
}

}  // namespace

TableSpec parse_table_spec(std::istream& in) {
  TableSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "title") spec.title = value;
    else if (key == "problem") spec.problem = value;
    else if (key == "levels") spec.levels = to_size(key, value);
    else if (key == "method") spec.method = parse_method(value);
    else if (key == "coarse_modes") {
      spec.coarse_modes.clear();
      for (const auto& w : split_words(value)) spec.coarse_modes.push_back(parse_coarse_mode(w));
    } else if (key == "rows") spec.rows = split_words(value);
    else if (key == "sweeps") {
      spec.sweeps.clear();
      for (const auto& w : split_words(value)) spec.sweeps.push_back(parse_sweep(w));
    } else if (key == "accelerators") {
      spec.accelerators.clear();
      for (const auto& w : split_words(value)) spec.accelerators.push_back(parse_accelerator(w));
    } else if (key == "omega") spec.omega = to_double(key, value);
    else if (key == "overlap") spec.overlap = to_size(key, value);
    else if (key == "tol") spec.tol = to_double(key, value);
    else if (key.rfind("max_iterations.", 0) == 0) {
      spec.max_iterations[parse_accelerator(key.substr(15))] = to_size(key, value);
    } else if (key == "checks") spec.checks = split_words(value);
    else if (key == "certify_levels") spec.certify_levels = to_size(key, value);
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (spec.rows.empty()) throw ConfigError("config has no rows");
  if (spec.levels < 2) throw ConfigError("levels must be at least 2");
  if (!(spec.omega > 0.0)) throw ConfigError("omega must be positive");
  return spec;
}

TableSpec load_table_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return parse_table_spec(in);
}

std::vector<ExperimentConfig> expand(const TableSpec& spec) {
  std::vector<ExperimentConfig> grid;
  const bool both = spec.coarse_modes.size() > 1;
  auto base = [&](Accelerator a, fem::CoarseMode m) {
    ExperimentConfig c;
    c.problem = spec.problem;
    c.levels = spec.levels;
    c.coarse_mode = m;
    c.method = spec.method;
    c.accelerator = a;
    c.omega = spec.omega;
    c.tol = spec.tol;
    c.overlap = spec.overlap;
    auto it = spec.max_iterations.find(a);
    c.max_iterations = it != spec.max_iterations.end() ? it->second : 100;
    return c;
  };
  switch (spec.method) {
    case Method::mult_mg:
    case Method::add_mg:
      for (const auto& row : spec.rows)
        for (auto a : spec.accelerators)
          for (auto m : spec.coarse_modes) {
            ExperimentConfig c = base(a, m);
            if (spec.method == Method::mult_mg) {
              auto comma = row.find(',');
              if (comma == std::string::npos) throw ConfigError("row '" + row + "': expected pre,post");
              c.mg.pre = SmootherSchedule(row.substr(0, comma));
              c.mg.post = SmootherSchedule(row.substr(comma + 1));
            } else {
              c.mg.pre = SmootherSchedule(row);
            }
            c.row = row;
            c.column = column_label(a, m, both);
            grid.push_back(c);
          }
      break;
    case Method::mult_dd:
      for (auto a : spec.accelerators)
        for (const auto& row : spec.rows)
          for (auto s : spec.sweeps)
            for (auto m : spec.coarse_modes) {
              ExperimentConfig c = base(a, m);
              c.dd.solver = parse_subdomain_solver(row);
              c.dd.sweep = s;
              c.row = to_string(a) + " " + row;
              c.column = sweep_label(s, m, both);
              grid.push_back(c);
            }
      break;
    case Method::add_dd:
      for (const auto& row : spec.rows)
        for (auto a : spec.accelerators)
          for (auto m : spec.coarse_modes) {
            ExperimentConfig c = base(a, m);
            c.dd.solver = parse_subdomain_solver(row);
            c.row = row;
            c.column = column_label(a, m, both);
            grid.push_back(c);
          }
      break;
  }
  return grid;
}

std::vector<TableRow> run_table(const TableSpec& spec) {
  std::map<fem::CoarseMode, Problem> built;
  for (auto m : spec.coarse_modes) built.emplace(m, build_problem(spec.problem, spec.levels, m, spec.overlap));
  std::vector<TableRow> rows;
  for (const auto& cfg : expand(spec)) rows.push_back(run_experiment(cfg, built.at(cfg.coarse_mode)));
  return rows;
}

// ---------------------------------------------------------------------------
// Regime checks

namespace {

const TableRow* find_row(const std::vector<TableRow>& rows, const std::string& row, Accelerator a,
                         fem::CoarseMode m = fem::CoarseMode::galerkin) {
  for (const auto& r : rows)
    if (r.config.row == row && r.config.accelerator == a && r.config.coarse_mode == m) return &r;
  return nullptr;
}

std::string describe(const TableRow* r) { return r ? r->cell() : "missing"; }

bool within_band(const TableRow* r, double target, double band = 0.5) {
  if (!r || !r->converged()) return false;
  const double it = static_cast<double>(r->report->iterations);
  return it >= (1.0 - band) * target && it <= (1.0 + band) * target;
}

bool nonsymmetric_cycle(const ExperimentConfig& c) { return c.mg.pre.adjoint() != c.mg.post; }

std::vector<CheckResult> lshape_mult_mg(const std::vector<TableRow>& rows) {
  std::vector<CheckResult> out;
  using A = Accelerator;
  {
    auto ff = find_row(rows, "ff,ff", A::none), fb = find_row(rows, "fb,fb", A::none);
    bool ok = ff && fb && ff->converged() && fb->converged() && ff->report->iterations <= fb->report->iterations;
    out.push_back({"nonsymmetric ff,ff needs no more iterations than symmetric fb,fb", ok,
                   describe(ff) + " vs " + describe(fb)});
  }
  {
    auto f0 = find_row(rows, "f,0", A::none), fbr = find_row(rows, "f,b", A::none);
    bool ok = f0 && fbr && f0->report && fbr->report;
    double two = 0.0, one = 0.0;
    if (ok) {
      two = std::pow(f0->report->mean_ratio(), 2.0);
      one = fbr->report->mean_ratio();
      ok = two <= one;
    }
    std::ostringstream d;
    d << "two f,0 steps reduce by " << two << ", one f,b step by " << one;
    out.push_back({"two f,0 iterations at least as effective as one f,b iteration", ok, d.str()});
  }
  {
    auto cg = find_row(rows, "f,0", A::cg);
    bool ok = cg && cg->report && cg->report->reason == StopReason::max_iterations && cg->config.max_iterations >= 100;
    out.push_back({"CG on f,0 exceeds 100 iterations", ok, describe(cg)});
  }
  {
    bool ok = true;
    std::string failed;
    for (const auto& r : rows)
      if (r.config.accelerator == A::bicgstab && !r.converged()) {
        ok = false;
        failed += " " + r.config.row;
      }
    out.push_back({"Bi-CGstab converges on every row", ok, ok ? "all converged" : "failed:" + failed});
  }
  {
    const TableRow* best = nullptr;
    for (const auto& r : rows)
      if (r.converged() && (!best || r.work() < best->work())) best = &r;
    bool ok = best && best->config.accelerator == A::bicgstab && nonsymmetric_cycle(best->config);
    out.push_back({"fastest work-normalized run is Bi-CGstab over a nonsymmetric cycle", ok,
                   best ? best->config.row + " " + to_string(best->config.accelerator) : "none converged"});
  }
  {
    auto fb = find_row(rows, "f,b", A::none), ffbb = find_row(rows, "ff,bb", A::none);
    auto cg = find_row(rows, "ff,bb", A::cg), cgfbfb = find_row(rows, "fb,fb", A::cg);
    auto bi = find_row(rows, "f,0", A::bicgstab);
    bool ok = within_band(fb, 23) && within_band(ffbb, 15) && within_band(cg, 9) && within_band(bi, 11);
    out.push_back({"iteration counts within 50% of f,b 23 / ff,bb 15 / CG ff,bb 9 / Bi-CGstab f,0 11", ok,
                   describe(fb) + " / " + describe(ffbb) + " / " + describe(cg) + " / " + describe(bi)});
    bool order = cg && cgfbfb && cg->converged() && cgfbfb->converged() &&
                 cg->report->iterations <= cgfbfb->report->iterations;
    out.push_back({"CG on ff,bb needs no more iterations than CG on fb,fb", order,
                   describe(cg) + " vs " + describe(cgfbfb)});
  }
  return out;
}

std::vector<CheckResult> pbe_mult_mg(const std::vector<TableRow>& rows) {
  using A = Accelerator;
  std::vector<CheckResult> out;
  bool degraded = false;
  std::string detail;
  for (const std::string row : {"f,0", "f,b"}) {
    auto g = find_row(rows, row, A::none, fem::CoarseMode::galerkin);
    auto d = find_row(rows, row, A::none, fem::CoarseMode::discretized);
    if (!g || !d) continue;
    const bool worse = !d->converged() || (g->converged() && d->report->iterations > g->report->iterations);
    degraded = degraded || worse;
    detail += row + ": " + describe(g) + " (" + describe(d) + ") ";
  }
  out.push_back({"discretized coarse operators diverge or degrade for f,0 or f,b", degraded, detail});
  bool ok = true;
  std::string failed;
  for (const auto& r : rows)
    if (r.config.accelerator == A::bicgstab && !r.converged()) {
      ok = false;
      failed += " " + r.config.row + "/" + to_string(r.config.coarse_mode);
    }
  out.push_back({"Bi-CGstab converges on every row", ok, ok ? "all converged" : "failed:" + failed});
  return out;
}

std::vector<CheckResult> additive_unaccelerated(const std::vector<TableRow>& rows) {
  std::vector<CheckResult> out;
  bool gal = true, disc = true, any_gal = false, any_disc = false;
  std::string detail;
  for (const auto& r : rows) {
    if (r.config.accelerator != Accelerator::none) continue;
    if (r.config.coarse_mode == fem::CoarseMode::galerkin) {
      any_gal = true;
      gal = gal && r.converged();
    } else {
      any_disc = true;
      disc = disc && !r.converged() && r.config.max_iterations >= 1000;
    }
    detail += r.config.row + (r.config.coarse_mode == fem::CoarseMode::galerkin ? "=" : "(disc)=") + r.cell() + " ";
  }
  out.push_back({"unaccelerated runs converge with Galerkin coarse operators", any_gal && gal, detail});
  out.push_back({"unaccelerated runs fail within 1000 iterations with discretized coarse operators",
                 any_disc && disc, detail});
  return out;
}

std::vector<CheckResult> bicgstab_all(const std::vector<TableRow>& rows) {
  bool ok = true;
  std::string failed;
  for (const auto& r : rows)
    if (r.config.accelerator == Accelerator::bicgstab && r.report && !r.converged()) {
      ok = false;
      failed += " " + r.config.row;
    }
  return {{"Bi-CGstab converges on every row", ok, ok ? "all converged" : "failed:" + failed}};
}

}  // namespace

std::vector<CheckResult> evaluate_checks(const TableSpec& spec, const std::vector<TableRow>& rows) {
  std::vector<CheckResult> out;
  for (const auto& name : spec.checks) {
    std::vector<CheckResult> part;
    if (name == "lshape_mult_mg") part = lshape_mult_mg(rows);
    else if (name == "pbe_mult_mg") part = pbe_mult_mg(rows);
    else if (name == "additive_unaccelerated") part = additive_unaccelerated(rows);
    else if (name == "bicgstab_converges") part = bicgstab_all(rows);
    else throw ConfigError("unknown check '" + name + "'");
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certification

verify::Checklist check_conditions(const ExperimentConfig& cfg, const Problem& p) {
  switch (cfg.method) {
    case Method::mult_mg: return verify::check_mult_mg(*p.hierarchy, cfg.mg);
    case Method::add_mg: return verify::check_add_mg(*p.hierarchy, cfg.mg);
    case Method::mult_dd: return verify::check_mult_dd(*p.decomposition, cfg.dd);
    case Method::add_dd: return verify::check_add_dd(*p.decomposition, cfg.dd);
  }
  throw ConfigError("unknown method");
}

std::vector<CertificationRow> certify_table(const TableSpec& spec) {
  std::map<fem::CoarseMode, Problem> built;
  for (auto m : spec.coarse_modes) built.emplace(m, build_problem(spec.problem, spec.certify_levels, m, spec.overlap));
  std::vector<CertificationRow> out;
  for (auto cfg : expand(spec)) {
    if (cfg.accelerator == Accelerator::bicgstab) continue;
    if (cfg.accelerator == Accelerator::cg && cfg.method != Method::add_mg && cfg.method != Method::add_dd) continue;
    cfg.levels = spec.certify_levels;
    CertificationRow row;
    row.config = cfg;
    const Problem& p = built.at(cfg.coarse_mode);
    if (!applicable(cfg)) {
      row.note = "--";
      out.push_back(std::move(row));
      continue;
    }
    try {
      row.checklist = check_conditions(cfg, p);
      row.certificate = verify::certify_spd(make_preconditioner(cfg, p));
    } catch (const std::exception& e) {
      row.note = std::string("ERR: ") + e.what();
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace schwarz::bench
