#include "schwarz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace schwarz::verify {

namespace {

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Vector v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

void probe_linearity(const LinearOperator& b, std::mt19937_64& rng) {
  const std::size_t n = b.cols();
  for (int trial = 0; trial < 3; ++trial) {
    Vector x = random_vector(n, rng), y = random_vector(n, rng);
    const double alpha = 0.7, beta = -1.3;
    Vector combo(n);
    for (std::size_t i = 0; i < n; ++i) combo[i] = alpha * x[i] + beta * y[i];
    Vector lhs = b(combo), bx = b(x), by = b(y);
    double diff = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) diff = std::max(diff, std::abs(lhs[i] - alpha * bx[i] - beta * by[i]));
    double scale = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) scale = std::max(scale, std::abs(alpha * bx[i]) + std::abs(beta * by[i]));
    if (diff > 1e-9 * std::max(scale, std::numeric_limits<double>::min()))
      throw NonlinearOperatorError("operator failed a linearity probe (relative defect " + std::to_string(diff / scale) +
                                   ")");
  }
}

double max_abs(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double min_sym_eig(const DenseMatrix& m) {
  if (m.rows() == 0) return 0.0;
  DenseMatrix s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

DenseMatrix inverse(const SparseMatrix& a) {
  return LuFactorization(a.to_dense()).solve(DenseMatrix::Identity(a.rows(), a.cols()));
}

/// Symmetric and positive (strict) or nonnegative (with relative slack).
struct SpdTest {
  double defect = 0.0;
  double min_eig = 0.0;
  double scale = 0.0;
};

SpdTest spd_test(const DenseMatrix& m) {
  SpdTest t;
  t.scale = max_abs(m);
  t.defect = symmetry_defect(m);
  t.min_eig = min_sym_eig(m);
  return t;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

Condition restriction_condition(const std::vector<std::pair<SparseMatrix, SparseMatrix>>& pairs) {
  Condition c{"restriction equals c times prolongation transpose, c > 0", true, 0.0, ""};
  double worst_c = std::numeric_limits<double>::infinity();
  for (const auto& [r, p] : pairs) {
    auto fit = restriction_defect(r, p);
    c.value = std::max(c.value, fit.defect);
    worst_c = std::min(worst_c, fit.c);
  }
  c.passed = c.value < 1e-12 && worst_c > 0.0;
  c.detail = "max defect " + fmt(c.value) + ", min fitted c " + fmt(pairs.empty() ? 1.0 : worst_c);
  return c;
}

std::vector<std::pair<SparseMatrix, SparseMatrix>> transfer_pairs(const fem::Hierarchy& h) {
  std::vector<std::pair<SparseMatrix, SparseMatrix>> pairs;
  for (std::size_t k = 1; k < h.depth(); ++k) pairs.emplace_back(h.levels[k].restriction, h.levels[k].prolongation);
  return pairs;
}

Condition coarse_symmetric(const DenseMatrix& inv) {
  Condition c{"coarsest solver symmetric", false, symmetry_defect(inv), ""};
  c.passed = c.value < SpdCertificate::symmetry_threshold;
  c.detail = "symmetry defect " + fmt(c.value);
  return c;
}

Condition coarse_nonnegative(const DenseMatrix& inv) {
  Condition c{"coarsest solver nonnegative", false, min_sym_eig(inv), ""};
  c.passed = c.value >= -1e-12 * max_abs(inv);
  c.detail = "min eigenvalue " + fmt(c.value);
  return c;
}

Condition levels_spd(const fem::Hierarchy& h) {
  Condition c{"level operators SPD", true, std::numeric_limits<double>::infinity(), ""};
  for (std::size_t k = 0; k < h.depth(); ++k) {
    auto t = spd_smoke_test(h.levels[k].a);
    c.passed = c.passed && t.passed;
    c.value = std::min(c.value, t.min_ritz);
  }
  c.detail = "min Ritz value " + fmt(c.value);
  return c;
}

Condition adjoint_smoothers(const fem::Hierarchy& h, const MgConfig& cfg) {
  Condition c{"post-smoother is the transpose of the pre-smoother", true, 0.0, ""};
  for (std::size_t k = 1; k < h.depth(); ++k) {
    DenseMatrix pre = smoother_matrix(cfg.pre, h.levels[k].a);
    DenseMatrix post = smoother_matrix(cfg.post, h.levels[k].a);
    const double scale = std::max(max_abs(pre), max_abs(post));
    if (scale == 0.0) continue;
    c.value = std::max(c.value, max_abs(post - pre.transpose()) / scale);
  }
  c.passed = c.value < SpdCertificate::symmetry_threshold;
  c.detail = "max relative defect " + fmt(c.value);
  return c;
}

double propagator_a_norm(const DenseMatrix& r, const SparseMatrix& a) {
  DenseMatrix ad = a.to_dense();
  DenseMatrix e = DenseMatrix::Identity(ad.rows(), ad.cols()) - r * ad;
  return a_norm_dense(e, ad);
}

DenseMatrix local_solver_matrix(const Decomposition& d, std::size_t k, SubdomainSolverKind kind, bool reverse) {
  if (kind == SubdomainSolverKind::exact) return inverse(d.local[k]);
  return smoother_matrix(subdomain_schedule(kind, reverse), d.local[k]);
}

}  // namespace

// ---------------------------------------------------------------------------

nlohmann::json SpdCertificate::to_json() const {
  return {{"symmetry_defect", symmetry_defect},
          {"min_eig", min_eig},
          {"norm", norm},
          {"probed", probed},
          {"passed", passed}};
}

SpdCertificate certify_spd(const LinearOperator& b, std::size_t dense_limit) {
  if (b.rows() != b.cols()) throw DimensionError("certify_spd: operator must be square");
  std::mt19937_64 rng(20240611);
  probe_linearity(b, rng);
  SpdCertificate cert;
  const std::size_t n = b.rows();
  if (n <= dense_limit) {
    DenseMatrix m = materialize(b);
    cert.norm = max_abs(m);
    cert.symmetry_defect = symmetry_defect(m);
    cert.min_eig = min_sym_eig(m);
  } else {
    cert.probed = true;
    double asym = 0.0, scale = 0.0;
    for (int pair = 0; pair < 64; ++pair) {
      Vector u = random_vector(n, rng), v = random_vector(n, rng);
      Vector bu = b(u), bv = b(v);
      asym = std::max(asym, std::abs(dot(bu, v) - dot(u, bv)) / (norm2(u) * norm2(v)));
      scale = std::max(scale, norm2(bu) / norm2(u));
    }
    cert.norm = scale;
    cert.symmetry_defect = scale > 0.0 ? asym / scale : 0.0;
    cert.min_eig = lanczos_extreme_ritz(b, 80).first;
  }
  cert.passed = cert.symmetry_defect < SpdCertificate::symmetry_threshold && cert.min_eig > 0.0;
  return cert;
}

double a_norm_dense(const DenseMatrix& e, const DenseMatrix& a) {
  Eigen::LLT<DenseMatrix> llt(a);
  if (llt.info() != Eigen::Success) throw NotSpdError("a_norm_dense: A is not SPD");
  DenseMatrix l = llt.matrixL();
  // X = E L^{-T}  <=>  L X^T = E^T
  DenseMatrix xt = llt.matrixL().solve(e.transpose());
  DenseMatrix s = l.transpose() * xt.transpose();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(s.transpose() * s, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

double a_norm(const LinearOperator& e, const SparseMatrix& a, double tol, std::size_t max_steps) {
  DenseMatrix em = materialize(e);
  DenseMatrix m = a_adjoint(em, a) * em;
  DenseMatrix ad = a.to_dense();
  std::mt19937_64 rng(77);
  Vector start = random_vector(a.rows(), rng);
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(start.data(), static_cast<Eigen::Index>(start.size()));
  x /= std::sqrt(x.dot(ad * x));
  double prev = -1.0, lambda = 0.0;
  for (std::size_t step = 0; step < max_steps; ++step) {
    Eigen::VectorXd y = m * x;
    Eigen::VectorXd ay = ad * y;
    lambda = x.dot(ad * y);
    const double ny2 = y.dot(ay);
    if (!(ny2 > 0.0)) return 0.0;
    x = y / std::sqrt(ny2);
    if (std::abs(lambda - prev) <= tol * std::abs(lambda)) return std::sqrt(std::max(lambda, 0.0));
    prev = lambda;
  }
  throw ConvergenceError("a_norm: power iteration did not converge; last Ritz values " + fmt(prev) + " and " +
                         fmt(lambda));
}

double spectral_radius(const DenseMatrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::EigenSolver<DenseMatrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_radius(const LinearOperator& op) { return spectral_radius(materialize(op)); }

bool PenaltyReport::chain_holds(double tol) const {
  return rho_ee <= norm_ee + tol && norm_ee <= norm_e_sq + tol && std::abs(norm_e_sq - rho_eestar) <= tol * norm_e_sq;
}

nlohmann::json PenaltyReport::to_json() const {
  return {{"rho_ee", rho_ee}, {"norm_ee", norm_ee}, {"norm_e_sq", norm_e_sq}, {"rho_eestar", rho_eestar}};
}

PenaltyReport penalty_report(const DenseMatrix& e, const SparseMatrix& a) {
  DenseMatrix ad = a.to_dense();
  DenseMatrix estar = a_adjoint(e, a);
  DenseMatrix ee = e * e;
  PenaltyReport r;
  r.rho_ee = spectral_radius(ee);
  r.norm_ee = a_norm_dense(ee, ad);
  const double ne = a_norm_dense(e, ad);
  r.norm_e_sq = ne * ne;
  r.rho_eestar = spectral_radius(DenseMatrix(e * estar));
  return r;
}

PenaltyReport penalty_report(const LinearOperator& e, const SparseMatrix& a) { return penalty_report(materialize(e), a); }

ConditionEstimate condition_estimate(const LinearOperator& b, const SparseMatrix& a) {
  DenseMatrix bm = materialize(b);
  DenseMatrix ad = a.to_dense();
  DenseMatrix aba = ad * bm * ad;
  aba = 0.5 * (aba + aba.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> ges(aba, ad, Eigen::EigenvaluesOnly);
  if (ges.info() != Eigen::Success) throw NotSpdError("condition_estimate: generalized eigensolve failed");
  ConditionEstimate c;
  c.lambda_min = ges.eigenvalues()(0);
  c.lambda_max = ges.eigenvalues()(ges.eigenvalues().size() - 1);
  c.kappa = c.lambda_max / c.lambda_min;
  return c;
}

DenseMatrix smoother_matrix(const SmootherSchedule& s, const SparseMatrix& a) {
  const std::size_t n = a.rows();
  DenseMatrix m = DenseMatrix::Zero(n, n);
  Vector z(n), r(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(z.begin(), z.end(), 0.0);
    r[j] = 1.0;
    apply_schedule(s, a, z, r);
    r[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) m(i, j) = z[i];
  }
  return m;
}

RestrictionFit restriction_defect(const SparseMatrix& restriction, const SparseMatrix& prolongation) {
  SparseMatrix pt = prolongation.transpose();
  if (pt.rows() != restriction.rows() || pt.cols() != restriction.cols())
    throw DimensionError("restriction_defect: shapes differ");
  double num = 0.0, den = 0.0;
  for (const auto& e : pt.triplets()) {
    num += restriction.coeff(e.row, e.col) * e.value;
    den += e.value * e.value;
  }
  RestrictionFit fit;
  fit.c = den > 0.0 ? num / den : 0.0;
  const double scale = restriction.max_abs();
  fit.defect = scale > 0.0 ? add(restriction, pt, 1.0, -fit.c).max_abs() / scale : 0.0;
  return fit;
}

double galerkin_defect(const fem::Hierarchy& h) {
  double worst = 0.0;
  for (std::size_t k = 1; k < h.depth(); ++k) {
    const auto& lv = h.levels[k];
    SparseMatrix g = fem::galerkin_coarsen(lv.a, lv.prolongation, lv.scaling);
    const double scale = h.levels[k - 1].a.max_abs();
    worst = std::max(worst, add(h.levels[k - 1].a, g, 1.0, -1.0).max_abs() / scale);
  }
  return worst;
}

bool Checklist::passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.passed; });
}

nlohmann::json Checklist::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["passed"] = passed();
  j["conditions"] = nlohmann::json::array();
  for (const auto& c : conditions)
    j["conditions"].push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
  return j;
}

// ---------------------------------------------------------------------------

namespace {

Checklist mult_mg_common(const fem::Hierarchy& h, const MgConfig& cfg, const DenseMatrix& coarse_inv) {
  Checklist list;
  list.conditions.push_back(levels_spd(h));
  list.conditions.push_back(restriction_condition(transfer_pairs(h)));
  list.conditions.push_back(adjoint_smoothers(h, cfg));
  list.conditions.push_back(coarse_symmetric(coarse_inv));
  return list;
}

}  // namespace

Checklist check_mult_mg(const fem::Hierarchy& h, const MgConfig& cfg) {
  const DenseMatrix inv = inverse(h.levels[0].a);
  Checklist list = mult_mg_common(h, cfg, inv);
  list.method = "multiplicative multigrid";

  const std::size_t fine = h.depth() - 1;
  Condition c5{"fine pre-smoother contracts in the energy norm", false, 0.0, ""};
  c5.value = propagator_a_norm(smoother_matrix(cfg.pre, h.levels[fine].a), h.levels[fine].a);
  c5.passed = c5.value < 1.0;
  c5.detail = "||I - R A||_A = " + fmt(c5.value);
  list.conditions.push_back(c5);

  Condition c6{"intermediate smoothers nonexpansive in the energy norm", true, 0.0, ""};
  for (std::size_t k = 1; k < fine; ++k)
    c6.value = std::max(c6.value, propagator_a_norm(smoother_matrix(cfg.pre, h.levels[k].a), h.levels[k].a));
  c6.passed = c6.value <= 1.0 + 1e-12;
  c6.detail = "max ||I - R_k A_k||_{A_k} = " + fmt(c6.value);
  list.conditions.push_back(c6);

  list.conditions.push_back(coarse_nonnegative(inv));
  return list;
}

Checklist check_mult_mg_convergent(const fem::Hierarchy& h, const MgConfig& cfg) {
  const DenseMatrix inv = inverse(h.levels[0].a);
  Checklist list = mult_mg_common(h, cfg, inv);
  list.method = "multiplicative multigrid (convergent)";
  auto shared = std::shared_ptr<const fem::Hierarchy>(&h, [](const fem::Hierarchy*) {});
  auto b = as_operator(std::make_shared<const MultiplicativeMultigrid>(shared, cfg));
  DenseMatrix e = materialize(error_propagator(b, h.fine_matrix()));
  Condition c{"V-cycle contracts in the energy norm", false, a_norm_dense(e, h.fine_matrix().to_dense()), ""};
  c.passed = c.value < 1.0;
  c.detail = "||I - BA||_A = " + fmt(c.value);
  list.conditions.push_back(c);
  return list;
}

Checklist check_add_mg(const fem::Hierarchy& h, const MgConfig& cfg) {
  Checklist list;
  list.method = "additive multigrid";
  list.conditions.push_back(restriction_condition(transfer_pairs(h)));
  const SmootherSchedule smoother = cfg.pre + cfg.post;
  const std::size_t fine = h.depth() - 1;

  auto t = spd_test(smoother_matrix(smoother, h.levels[fine].a));
  Condition c2{"fine smoother SPD", t.defect < SpdCertificate::symmetry_threshold && t.min_eig > 0.0, t.min_eig,
               "symmetry defect " + fmt(t.defect) + ", min eigenvalue " + fmt(t.min_eig)};
  list.conditions.push_back(c2);

  Condition c3{"coarser smoothers symmetric nonnegative", true, 0.0, ""};
  double worst_defect = 0.0, worst_eig = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < fine; ++k) {
    DenseMatrix r = k == 0 ? inverse(h.levels[0].a) : smoother_matrix(smoother, h.levels[k].a);
    auto s = spd_test(r);
    worst_defect = std::max(worst_defect, s.defect);
    worst_eig = std::min(worst_eig, s.min_eig);
    c3.passed = c3.passed && s.defect < SpdCertificate::symmetry_threshold && s.min_eig >= -1e-12 * s.scale;
  }
  c3.value = worst_defect;
  c3.detail = "max symmetry defect " + fmt(worst_defect) + ", min eigenvalue " + fmt(worst_eig);
  list.conditions.push_back(c3);
  return list;
}

Checklist check_mult_dd(const Decomposition& d, const DdConfig& cfg) {
  Checklist list;
  list.method = "multiplicative domain decomposition";
  std::vector<std::pair<SparseMatrix, SparseMatrix>> pairs;
  if (d.coarse) pairs.emplace_back(d.coarse->restriction, d.coarse->prolongation);
  list.conditions.push_back(restriction_condition(pairs));

  Condition c2{"reverse pass applies the transposed local solvers", true, 0.0, ""};
  if (cfg.sweep != DdSweep::forw_back) {
    c2.passed = false;
    c2.value = 1.0;
    c2.detail = "sweep " + to_string(cfg.sweep) + " has no reversed adjoint pass";
  } else {
    for (std::size_t k = 0; k < d.subdomains.size(); ++k) {
      DenseMatrix fwd = local_solver_matrix(d, k, cfg.solver, false);
      DenseMatrix rev = local_solver_matrix(d, k, cfg.solver, true);
      c2.value = std::max(c2.value, max_abs(rev - fwd.transpose()) / max_abs(fwd));
    }
    c2.passed = c2.value < SpdCertificate::symmetry_threshold;
    c2.detail = "max relative defect " + fmt(c2.value);
  }
  list.conditions.push_back(c2);

  DenseMatrix inv;
  if (d.coarse) {
    inv = inverse(d.coarse->a);
    list.conditions.push_back(coarse_symmetric(inv));
  }

  auto bare = std::make_shared<Decomposition>(d);
  bare->coarse.reset();
  DdConfig pass_cfg = cfg;
  pass_cfg.sweep = DdSweep::forw;
  if (pass_cfg.solver == SubdomainSolverKind::adjointed) pass_cfg.solver = SubdomainSolverKind::nonsymmetric;
  auto pass = as_operator(std::make_shared<const MultiplicativeDd>(bare, pass_cfg));
  DenseMatrix e = materialize(error_propagator(pass, *d.a));
  Condition c4{"subdomain pass contracts in the energy norm", false, a_norm_dense(e, d.a->to_dense()), ""};
  c4.passed = c4.value < 1.0;
  c4.detail = "||prod (I - I_k R_k I_k^T A)||_A = " + fmt(c4.value);
  list.conditions.push_back(c4);

  if (d.coarse) list.conditions.push_back(coarse_nonnegative(inv));
  return list;
}

Checklist check_add_dd(const Decomposition& d, const DdConfig& cfg) {
  Checklist list;
  list.method = "additive domain decomposition";
  std::vector<std::pair<SparseMatrix, SparseMatrix>> pairs;
  if (d.coarse) pairs.emplace_back(d.coarse->restriction, d.coarse->prolongation);
  list.conditions.push_back(restriction_condition(pairs));

  Condition c2{"local solvers SPD", true, std::numeric_limits<double>::infinity(), ""};
  double worst_defect = 0.0;
  for (std::size_t k = 0; k < d.subdomains.size(); ++k) {
    auto t = spd_test(local_solver_matrix(d, k, cfg.solver, false));
    worst_defect = std::max(worst_defect, t.defect);
    c2.value = std::min(c2.value, t.min_eig);
  }
  c2.passed = worst_defect < SpdCertificate::symmetry_threshold && c2.value > 0.0;
  c2.detail = "max symmetry defect " + fmt(worst_defect) + ", min eigenvalue " + fmt(c2.value);
  list.conditions.push_back(c2);

  if (d.coarse) {
    DenseMatrix inv = inverse(d.coarse->a);
    Condition c3 = coarse_symmetric(inv);
    Condition nn = coarse_nonnegative(inv);
    c3.name = "coarse solver symmetric nonnegative";
    c3.passed = c3.passed && nn.passed;
    c3.detail += ", " + nn.detail;
    list.conditions.push_back(c3);
  }
  return list;
}

}  // namespace schwarz::verify
