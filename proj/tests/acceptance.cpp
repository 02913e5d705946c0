// Acceptance runner: one PASS/FAIL line per criterion; exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "schwarz/bench.hpp"
#include "schwarz/problems.hpp"
#include "schwarz/verify.hpp"

using namespace schwarz;
using namespace schwarz::bench;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

int failures = 0;

void report(bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  " << what << "  [" << detail << "]" << std::endl;
}

MgConfig mg(const std::string& pre, const std::string& post) {
  MgConfig c;
  c.pre = SmootherSchedule(pre == "0" ? "" : pre);
  c.post = SmootherSchedule(post == "0" ? "" : post);
  return c;
}

DdConfig dd(SubdomainSolverKind solver, DdSweep sweep) {
  DdConfig c;
  c.solver = solver;
  c.sweep = sweep;
  return c;
}

/// One preconditioner of the certification battery.
struct Entry {
  std::string name;
  LinearOperator b;
  verify::Checklist conditions;
  bool designated_violation = false;
};

std::vector<Entry> battery(const std::shared_ptr<const fem::Hierarchy>& h) {
  auto d = std::make_shared<const Decomposition>(build_decomposition(*h, 1));
  std::vector<Entry> out;
  for (const auto& [pre, post] : std::vector<std::pair<std::string, std::string>>{
           {"f", "b"}, {"ff", "bb"}, {"fb", "fb"}, {"b", "f"}, {"f", "0"}, {"ff", "b"}, {"0", "fb"}}) {
    auto cfg = mg(pre, post);
    out.push_back({"mult_mg " + pre + "," + post,
                   as_operator(std::make_shared<const MultiplicativeMultigrid>(h, cfg)),
                   verify::check_mult_mg(*h, cfg), false});
  }
  out.push_back({"mult_mg f,f", as_operator(std::make_shared<const MultiplicativeMultigrid>(h, mg("f", "f"))),
                 verify::check_mult_mg(*h, mg("f", "f")), true});

  auto injected = std::make_shared<fem::Hierarchy>(*h);
  for (std::size_t k = 1; k < injected->depth(); ++k) {
    auto& lv = injected->levels[k];
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < lv.restriction.rows(); ++i) t.push_back({i, i, 1.0});
    lv.restriction = SparseMatrix(lv.restriction.rows(), lv.restriction.cols(), std::move(t));
  }
  out.push_back({"mult_mg f,b injection",
                 as_operator(std::make_shared<const MultiplicativeMultigrid>(injected, mg("f", "b"))),
                 verify::check_mult_mg(*injected, mg("f", "b")), true});

  for (const std::string s : {"f", "fb", "ffbb", "fbfb"}) {
    auto cfg = mg(s, "0");
    out.push_back({"add_mg " + s, as_operator(std::make_shared<const AdditiveMultigrid>(h, cfg)),
                   verify::check_add_mg(*h, cfg), false});
  }

  using K = SubdomainSolverKind;
  for (auto [kind, sweep] : std::vector<std::pair<K, DdSweep>>{{K::exact, DdSweep::forw_back},
                                                              {K::symmetric, DdSweep::forw_back},
                                                              {K::adjointed, DdSweep::forw_back},
                                                              {K::nonsymmetric, DdSweep::forw_back},
                                                              {K::exact, DdSweep::forw_forw},
                                                              {K::symmetric, DdSweep::forw_forw}}) {
    auto cfg = dd(kind, sweep);
    out.push_back({"mult_dd " + to_string(kind) + " " + to_string(sweep),
                   as_operator(std::make_shared<const MultiplicativeDd>(d, cfg)), verify::check_mult_dd(*d, cfg),
                   false});
  }
  auto forw = dd(K::exact, DdSweep::forw);
  out.push_back({"mult_dd exact forw", as_operator(std::make_shared<const MultiplicativeDd>(d, forw)),
                 verify::check_mult_dd(*d, forw), true});
  for (auto kind : {K::exact, K::symmetric, K::nonsymmetric}) {
    auto cfg = dd(kind, DdSweep::forw_back);
    out.push_back({"add_dd " + to_string(kind), as_operator(std::make_shared<const AdditiveDd>(d, cfg)),
                   verify::check_add_dd(*d, cfg), false});
  }
  return out;
}

std::shared_ptr<const fem::Hierarchy> square(std::size_t levels) {
  return std::make_shared<const fem::Hierarchy>(fem::build_hierarchy(
      problems::laplace_problem(), problems::unit_square_mesh(3), levels, fem::CoarseMode::galerkin));
}

DenseMatrix random_dense(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = g(rng);
  return m;
}

struct Battery {
  std::string problem;
  std::shared_ptr<const fem::Hierarchy> h;
  std::vector<Entry> entries;
  std::vector<verify::SpdCertificate> certificates;
};

void battery_checks(std::vector<Battery>& batteries) {
  // penalty chain
  {
    const auto start = Clock::now();
    std::mt19937_64 rng(2024);
    std::size_t held = 0, total = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 30;
      DenseMatrix q = random_dense(n, rng);
      DenseMatrix a = q.transpose() * q + static_cast<double>(n) * DenseMatrix::Identity(n, n);
      DenseMatrix b = random_dense(n, rng);
      while (std::abs(b.determinant()) < 1e-8) b = random_dense(n, rng);
      b *= 1.0 / (b.norm() * a.norm());
      const DenseMatrix e = DenseMatrix::Identity(n, n) - b * a;
      auto r = verify::penalty_report(e, SparseMatrix::from_dense(a));
      ++total;
      held += r.chain_holds(1e-8);
      worst = std::max({worst, r.rho_ee - r.norm_ee, r.norm_ee - r.norm_e_sq});
    }
    for (auto& bat : batteries)
      for (auto& e : bat.entries) {
        auto r = verify::penalty_report(error_propagator(e.b, bat.h->fine_matrix()), bat.h->fine_matrix());
        ++total;
        held += r.chain_holds(1e-8);
        worst = std::max({worst, r.rho_ee - r.norm_ee, r.norm_ee - r.norm_e_sq});
      }
    const double t = seconds_since(start);
    report(held == total && t < 60.0, "penalty chain rho(EE) <= ||EE||_A <= ||E||_A^2",
           std::to_string(held) + "/" + std::to_string(total) + " hold, worst excess " + sci(worst) + ", " +
               sci(t) + " s");
  }

  // certification soundness
  {
    const auto start = Clock::now();
    std::size_t sound = 0, passing = 0, violations_ok = 0, violations = 0;
    std::string bad;
    for (auto& bat : batteries)
      for (std::size_t i = 0; i < bat.entries.size(); ++i) {
        const auto& e = bat.entries[i];
        const auto& c = bat.certificates[i];
        if (e.conditions.passed()) {
          ++passing;
          if (c.passed && c.symmetry_defect < verify::SpdCertificate::symmetry_threshold && c.min_eig > 0.0)
            ++sound;
          else
            bad += " " + bat.problem + ":" + e.name;
        }
        if (e.designated_violation) {
          ++violations;
          if (c.symmetry_defect > 1e-6) ++violations_ok;
          else bad += " " + bat.problem + ":" + e.name + "(symmetric)";
        }
      }
    const double t = seconds_since(start);
    report(sound == passing && violations_ok == violations && passing > 0 && t < 120.0,
           "conditions imply SPD; violations are asymmetric",
           std::to_string(sound) + "/" + std::to_string(passing) + " sound, " + std::to_string(violations_ok) + "/" +
               std::to_string(violations) + " violations asymmetric" + (bad.empty() ? "" : ", offending:" + bad));
  }

  // condition bound and CG acceleration on certified configurations
  {
    std::size_t checked = 0, kappa_ok = 0, cg_ok = 0;
    std::string bad3, bad4;
    std::mt19937_64 rng(7);
    for (auto& bat : batteries) {
      const SparseMatrix& a = bat.h->fine_matrix();
      const auto& mesh = bat.h->finest().mesh;
      std::normal_distribution<double> g;
      Vector u(a.rows());
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = mesh.dirichlet[i] ? 0.0 : g(rng);
      const Vector f = spmv(a, u);
      for (std::size_t i = 0; i < bat.entries.size(); ++i) {
        if (!bat.certificates[i].passed) continue;
        const auto& e = bat.entries[i];
        const double delta = verify::a_norm(error_propagator(e.b, a), a);
        if (!(delta < 1.0)) continue;
        ++checked;
        const double kappa = verify::condition_estimate(e.b, a).kappa;
        const double bound = (1.0 + delta) / (1.0 - delta);
        if (kappa <= bound * (1.0 + 1e-9)) ++kappa_ok;
        else bad3 += " " + bat.problem + ":" + e.name;
        auto rep = pcg_solve(a, e.b, f, StoppingRule::a_norm(u, 500));
        if (rep.converged && rep.mean_ratio() < delta) ++cg_ok;
        else bad4 += " " + bat.problem + ":" + e.name + "(" + sci(rep.mean_ratio()) + " vs " + sci(delta) + ")";
      }
    }
    auto h = batteries.front().h;
    const SparseMatrix& a = h->fine_matrix();
    const double exact_kappa =
        verify::condition_estimate(LinearOperator::from_dense(a.to_dense().inverse()), a).kappa;
    const bool exact_ok = std::abs(exact_kappa - 1.0) < 1e-12;
    report(kappa_ok == checked && checked > 0 && exact_ok, "kappa(BA) <= (1+delta)/(1-delta); exact B gives 1",
           std::to_string(kappa_ok) + "/" + std::to_string(checked) + " within bound, exact kappa - 1 = " +
               sci(exact_kappa - 1.0) + (bad3.empty() ? "" : ", offending:" + bad3));
    report(cg_ok == checked && checked > 0, "PCG mean error ratio below delta",
           std::to_string(cg_ok) + "/" + std::to_string(checked) + (bad4.empty() ? "" : ", offending:" + bad4));
  }

  // omega invariance
  {
    auto p = build_problem("lshape", 4, fem::CoarseMode::galerkin);
    bool identical = true, counts_equal = true;
    double deviation = 0.0;
    for (auto method : {Method::add_mg, Method::add_dd}) {
      ExperimentConfig cfg;
      cfg.problem = "lshape";
      cfg.levels = 4;
      cfg.method = method;
      cfg.mg = mg("fb", "0");
      cfg.dd = dd(SubdomainSolverKind::symmetric, DdSweep::forw_back);
      cfg.accelerator = Accelerator::cg;
      cfg.max_iterations = 500;
      cfg.omega = 1.0;
      auto base = run_experiment(cfg, p);
      cfg.accelerator = Accelerator::none;
      const LinearOperator b1 = make_preconditioner(cfg, p);
      cfg.accelerator = Accelerator::cg;
      const SparseMatrix& a = p.hierarchy->fine_matrix();
      const Vector f = subtract(p.rhs, spmv(a, p.lift));
      const auto rule = StoppingRule::a_norm(subtract(p.reference, p.lift), 500);
      const auto unscaled = pcg_solve(a, b1, f, rule);
      for (double omega : {0.3, 0.45, 1.0}) {
        cfg.omega = omega;
        auto r = run_experiment(cfg, p);
        identical = identical && r.report && base.report && r.report->error_ratio == base.report->error_ratio;
        auto scaled = pcg_solve(a, b1.scaled(omega), f, rule);
        counts_equal = counts_equal && scaled.iterations == unscaled.iterations;
        for (std::size_t k = 0; k < std::min(scaled.error_ratio.size(), unscaled.error_ratio.size()); ++k)
          deviation = std::max(deviation, std::abs(scaled.error_ratio[k] - unscaled.error_ratio[k]));
      }
    }
    report(identical, "PCG histories bit-identical for omega in {0.3, 0.45, 1.0}",
           std::string("additive configs with varying omega: ") + (identical ? "identical" : "differ") +
               "; explicitly scaled B: iteration counts " + (counts_equal ? "equal" : "differ") +
               ", max history deviation " + sci(deviation));
  }
}

void galerkin_identity() {
  double laplace = 0.0;
  for (auto [spec, mesh] : {std::pair{problems::laplace_problem(), problems::unit_square_mesh(3)},
                            std::pair{problems::lshape_problem(), problems::lshape_mesh()}}) {
    auto direct = fem::build_hierarchy(spec, mesh, 4, fem::CoarseMode::discretized);
    laplace = std::max(laplace, verify::galerkin_defect(direct));
  }
  auto pbe = fem::build_hierarchy(problems::pbe_problem(), problems::pbe_mesh(), 4, fem::CoarseMode::discretized);
  const double pbe_defect = verify::galerkin_defect(pbe);
  report(laplace <= 1e-12 && pbe_defect > 1e-6, "Galerkin identity for Laplace, nonzero defect for PBE",
         "Laplace defect " + sci(laplace) + ", PBE defect " + sci(pbe_defect));
}

bool run_checks(const std::string& config, std::string& detail, double& seconds) {
  const auto spec = load_table_spec(std::string(CONFIG_DIR) + "/" + config);
  const auto start = Clock::now();
  const auto rows = run_table(spec);
  const auto checks = evaluate_checks(spec, rows);
  seconds += seconds_since(start);
  bool ok = true;
  for (const auto& c : checks) {
    if (!c.passed) detail += " " + config + ":" + c.name + " (" + c.detail + ")";
    ok = ok && c.passed;
  }
  return ok;
}

void table_regimes() {
  {
    std::string detail;
    double t = 0.0;
    const bool ok = run_checks("lshape_mult_mg.cfg", detail, t);
    report(ok && t < 600.0, "L-shape multigrid bands and regime suite",
           sci(t) + " s" + (detail.empty() ? ", all checks pass" : ", failed:" + detail));
  }
  {
    std::string detail;
    double t = 0.0;
    bool ok = true;
    for (const char* cfg : {"pbe_mult_mg.cfg", "pbe_mult_dd.cfg", "pbe_add_mg.cfg", "pbe_add_dd.cfg"}) ok = run_checks(cfg, detail, t) && ok;
    report(ok, "PBE qualitative regimes", sci(t) + " s" + (detail.empty() ? ", all checks pass" : ", failed:" + detail));
  }
}

void vcycle_contraction() {
  bool ok = true;
  std::string detail;
  for (const std::string name : {"pbe2d", "lshape"}) {
    auto p = build_problem(name, 3, fem::CoarseMode::galerkin);
    const SparseMatrix& a = p.hierarchy->fine_matrix();
    for (const auto& [pre, post] : {std::pair{"f", "b"}, std::pair{"ff", "bb"}, std::pair{"fb", "fb"}}) {
      auto b = as_operator(std::make_shared<const MultiplicativeMultigrid>(p.hierarchy, mg(pre, post)));
      const double norm = verify::a_norm(error_propagator(b, a), a);
      ok = ok && norm < 1.0;
      detail += " " + name + " " + pre + "," + post + "=" + sci(norm);
    }
  }
  report(ok, "||I - BA||_A < 1 for symmetric variational V-cycles at 3 levels", detail.substr(1));
}

}  // namespace

int main() {
  try {
    std::vector<Battery> batteries;
    for (std::size_t levels : {2, 3}) {
      Battery b;
      b.h = square(levels);
      b.problem = "square" + std::to_string(levels) + "(n=" + std::to_string(b.h->size()) + ")";
      b.entries = battery(b.h);
      for (const auto& e : b.entries) b.certificates.push_back(verify::certify_spd(e.b));
      batteries.push_back(std::move(b));
    }
    battery_checks(batteries);
    galerkin_identity();
    table_regimes();
    vcycle_contraction();
  } catch (const std::exception& e) {
    std::cout << "FAIL  acceptance aborted: " << e.what() << std::endl;
    return 2;
  }
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
