#include "schwarz/schwarz.hpp"

#include <algorithm>
#include <set>

namespace schwarz {

namespace {

template <class T>
std::shared_ptr<const T> borrow(const T& x) {
  return std::shared_ptr<const T>(&x, [](const T*) {});
}

double spmv_cost(const SparseMatrix& a) { return 2.0 * static_cast<double>(a.nnz()); }

double lu_solve_cost(std::size_t n) { return 2.0 * static_cast<double>(n) * static_cast<double>(n); }

void check_hierarchy(const fem::Hierarchy& h) {
  if (h.depth() < 2) throw std::invalid_argument("multigrid: hierarchy needs at least two levels");
}

}  // namespace

// ---------------------------------------------------------------------------
// Multiplicative multigrid

MultiplicativeMultigrid::MultiplicativeMultigrid(std::shared_ptr<const fem::Hierarchy> h, MgConfig cfg)
    : h_(std::move(h)), cfg_(std::move(cfg)) {
  check_hierarchy(*h_);
  coarse_ = LuFactorization(h_->levels[0].a.to_dense());
  cost_ = lu_solve_cost(h_->levels[0].a.rows());
  for (std::size_t k = 1; k < h_->depth(); ++k) {
    const auto& lv = h_->levels[k];
    const double n = static_cast<double>(lv.a.rows());
    cost_ += schedule_cost(cfg_.pre, lv.a) + schedule_cost(cfg_.post, lv.a);
    cost_ += spmv_cost(lv.a) + n + spmv_cost(lv.restriction) + spmv_cost(lv.prolongation) + n;
  }
}

void MultiplicativeMultigrid::cycle(std::size_t k, std::span<const double> r, std::span<double> z) const {
  if (k == 0) {
    std::copy(r.begin(), r.end(), z.begin());
    coarse_.solve_in_place(z);
    return;
  }
  const auto& lv = h_->levels[k];
  std::fill(z.begin(), z.end(), 0.0);
  apply_schedule(cfg_.pre, lv.a, z, r);

  Vector res(r.size());
  lv.a.multiply(z, res);
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = r[i] - res[i];
  const std::size_t nc = lv.restriction.rows();
  Vector rc(nc), zc(nc);
  lv.restriction.multiply(res, rc);
  cycle(k - 1, rc, zc);
  Vector corr(r.size());
  lv.prolongation.multiply(zc, corr);
  axpy(1.0, corr, z);

  apply_schedule(cfg_.post, lv.a, z, r);
}

void MultiplicativeMultigrid::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != size() || z.size() != size()) throw DimensionError("multiplicative multigrid: dimension mismatch");
  cycle(h_->depth() - 1, r, z);
}

Vector MultiplicativeMultigrid::apply(std::span<const double> r) const {
  Vector z(size());
  apply(r, z);
  return z;
}

// ---------------------------------------------------------------------------
// Additive multigrid

AdditiveMultigrid::AdditiveMultigrid(std::shared_ptr<const fem::Hierarchy> h, MgConfig cfg)
    : h_(std::move(h)), smoother_(cfg.pre + cfg.post), omega_(cfg.omega) {
  check_hierarchy(*h_);
  if (!(omega_ > 0.0)) throw std::invalid_argument("additive multigrid: omega must be positive");
  coarse_ = LuFactorization(h_->levels[0].a.to_dense());
  cost_ = lu_solve_cost(h_->levels[0].a.rows()) + static_cast<double>(size());
  for (std::size_t k = 1; k < h_->depth(); ++k) {
    const auto& lv = h_->levels[k];
    cost_ += schedule_cost(smoother_, lv.a) + spmv_cost(lv.restriction) + spmv_cost(lv.prolongation) +
             static_cast<double>(lv.a.rows());
  }
}

void AdditiveMultigrid::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != size() || z.size() != size()) throw DimensionError("additive multigrid: dimension mismatch");
  const std::size_t depth = h_->depth();
  std::vector<Vector> res(depth);
  res[depth - 1].assign(r.begin(), r.end());
  for (std::size_t k = depth - 1; k > 0; --k) {
    res[k - 1].resize(h_->levels[k].restriction.rows());
    h_->levels[k].restriction.multiply(res[k], res[k - 1]);
  }
  Vector acc = res[0];
  coarse_.solve_in_place(acc);
  for (std::size_t k = 1; k < depth; ++k) {
    const auto& lv = h_->levels[k];
    Vector next(lv.a.rows(), 0.0);
    apply_schedule(smoother_, lv.a, next, res[k]);
    Vector up(lv.a.rows());
    lv.prolongation.multiply(acc, up);
    axpy(1.0, up, next);
    acc = std::move(next);
  }
  for (std::size_t i = 0; i < acc.size(); ++i) z[i] = omega_ * acc[i];
}

Vector AdditiveMultigrid::apply(std::span<const double> r) const {
  Vector z(size());
  apply(r, z);
  return z;
}

// ---------------------------------------------------------------------------
// Decomposition

Decomposition build_decomposition(const fem::Hierarchy& h, std::size_t overlap, bool coarse_space) {
  check_hierarchy(h);
  const auto& fine = h.finest().mesh;
  const std::size_t nc = h.levels[0].mesh.num_triangles();
  std::size_t per = 1;
  for (std::size_t k = 1; k < h.depth(); ++k) per *= 4;

  std::vector<std::vector<std::size_t>> vertex_triangles(fine.num_vertices());
  for (std::size_t t = 0; t < fine.num_triangles(); ++t)
    for (auto v : fine.triangles[t]) vertex_triangles[v].push_back(t);

  Decomposition d;
  d.a = std::make_shared<const SparseMatrix>(h.fine_matrix());
  for (std::size_t v = 0; v < fine.num_vertices(); ++v)
    if (fine.dirichlet[v]) d.dirichlet.push_back(v);

  for (std::size_t e = 0; e < nc; ++e) {
    std::set<std::size_t> verts;
    for (std::size_t t = e * per; t < (e + 1) * per; ++t)
      for (auto v : fine.triangles[t]) verts.insert(v);
    for (std::size_t layer = 0; layer < overlap; ++layer) {
      std::set<std::size_t> grown = verts;
      for (auto v : verts)
        for (auto t : vertex_triangles[v])
          for (auto w : fine.triangles[t]) grown.insert(w);
      verts = std::move(grown);
    }
    std::vector<std::size_t> idx;
    for (auto v : verts)
      if (!fine.dirichlet[v]) idx.push_back(v);
    if (idx.empty()) throw EmptySubdomainError("subdomain " + std::to_string(e) + " has no free unknowns");
    d.local.push_back(d.a->principal_submatrix(idx));
    d.subdomains.push_back(std::move(idx));
  }

  if (coarse_space) {
    Decomposition::Coarse c;
    c.prolongation = fem::composite_prolongation(h, 0);
    c.scaling = 1.0;
    c.restriction = c.prolongation.transpose().scaled(c.scaling);
    c.a = h.levels[0].a;
    d.coarse = std::move(c);
  }
  return d;
}

DdSweep parse_sweep(std::string_view name) {
  if (name == "forw") return DdSweep::forw;
  if (name == "forw_back" || name == "forw/back") return DdSweep::forw_back;
  if (name == "forw_forw" || name == "forw/forw") return DdSweep::forw_forw;
  throw std::invalid_argument("unknown sweep '" + std::string(name) + "'");
}

std::string to_string(DdSweep sweep) {
  switch (sweep) {
    case DdSweep::forw: return "forw";
    case DdSweep::forw_back: return "forw/back";
    case DdSweep::forw_forw: return "forw/forw";
  }
  return "?";
}

SubdomainSolvers::SubdomainSolvers(const Decomposition& d, SubdomainSolverKind kind) : d_(&d), kind_(kind) {
  if (kind_ == SubdomainSolverKind::exact)
    for (const auto& a : d.local) lu_.emplace_back(a.to_dense());
}

void SubdomainSolvers::solve(std::size_t k, std::span<const double> r, std::span<double> z, bool reverse_pass) const {
  if (kind_ == SubdomainSolverKind::exact) {
    std::copy(r.begin(), r.end(), z.begin());
    lu_[k].solve_in_place(z);
    return;
  }
  std::fill(z.begin(), z.end(), 0.0);
  apply_schedule(subdomain_schedule(kind_, reverse_pass), d_->local[k], z, r);
}

double SubdomainSolvers::cost(std::size_t k) const {
  if (kind_ == SubdomainSolverKind::exact) return lu_solve_cost(d_->subdomains[k].size());
  return schedule_cost(subdomain_schedule(kind_, false), d_->local[k]);
}

namespace {

double coarse_cost(const Decomposition& d) {
  if (!d.coarse) return 0.0;
  const auto& c = *d.coarse;
  return spmv_cost(c.restriction) + lu_solve_cost(c.a.rows()) + spmv_cost(c.prolongation) +
         static_cast<double>(d.size());
}

std::optional<LuFactorization> factor_coarse(const Decomposition& d) {
  if (!d.coarse) return std::nullopt;
  return LuFactorization(d.coarse->a.to_dense());
}

}  // namespace

// ---------------------------------------------------------------------------
// Multiplicative domain decomposition

MultiplicativeDd::MultiplicativeDd(std::shared_ptr<const Decomposition> d, DdConfig cfg)
    : d_(std::move(d)), cfg_(cfg), solvers_(*d_, cfg.solver), coarse_(factor_coarse(*d_)) {
  if (cfg_.solver == SubdomainSolverKind::adjointed && cfg_.sweep == DdSweep::forw)
    throw std::invalid_argument("multiplicative DD: the adjointed solver needs a second subdomain pass");
  if (cfg_.coarse_visits < 1) throw std::invalid_argument("multiplicative DD: coarse_visits must be positive");
  double pass_cost = 0.0;
  const auto& a = *d_->a;
  for (std::size_t k = 0; k < d_->subdomains.size(); ++k) {
    double rows_nnz = 0.0;
    for (auto i : d_->subdomains[k]) rows_nnz += static_cast<double>(a.row_cols(i).size());
    const double m = static_cast<double>(d_->subdomains[k].size());
    pass_cost += 2.0 * rows_nnz + m + solvers_.cost(k) + m;
  }
  const double passes = cfg_.sweep == DdSweep::forw ? 1.0 : 2.0;
  const double coarse_visits = cfg_.sweep == DdSweep::forw_forw ? 2.0 : 1.0;
  const double coarse = d_->coarse ? coarse_cost(*d_) + spmv_cost(a) + static_cast<double>(a.rows()) : 0.0;
  cost_ = passes * pass_cost + coarse_visits * cfg_.coarse_visits * coarse;
}

void MultiplicativeDd::pass(std::span<const double> r, std::span<double> u, bool reverse, bool second) const {
  const auto& a = *d_->a;
  const std::size_t ns = d_->subdomains.size();
  Vector rl, zl;
  for (std::size_t s = 0; s < ns; ++s) {
    const std::size_t k = reverse ? ns - 1 - s : s;
    const auto& idx = d_->subdomains[k];
    rl.resize(idx.size());
    zl.resize(idx.size());
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const std::size_t i = idx[m];
      double v = r[i];
      auto cols = a.row_cols(i);
      auto vals = a.row_values(i);
      for (std::size_t q = 0; q < cols.size(); ++q) v -= vals[q] * u[cols[q]];
      rl[m] = v;
    }
    solvers_.solve(k, rl, zl, second);
    for (std::size_t m = 0; m < idx.size(); ++m) u[idx[m]] += zl[m];
  }
}

void MultiplicativeDd::coarse_correction(std::span<const double> r, std::span<double> u) const {
  if (!d_->coarse) return;
  const auto& c = *d_->coarse;
  const auto& a = *d_->a;
  for (int visit = 0; visit < cfg_.coarse_visits; ++visit) {
    Vector res(a.rows());
    a.multiply(u, res);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] = r[i] - res[i];
    Vector rc(c.restriction.rows());
    c.restriction.multiply(res, rc);
    coarse_->solve_in_place(rc);
    Vector corr(a.rows());
    c.prolongation.multiply(rc, corr);
    axpy(1.0, corr, u);
  }
}

void MultiplicativeDd::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != size() || z.size() != size()) throw DimensionError("multiplicative DD: dimension mismatch");
  std::fill(z.begin(), z.end(), 0.0);
  for (auto i : d_->dirichlet) z[i] = r[i];
  pass(r, z, false, false);
  coarse_correction(r, z);
  switch (cfg_.sweep) {
    case DdSweep::forw: break;
    case DdSweep::forw_back: pass(r, z, true, true); break;
    case DdSweep::forw_forw:
      pass(r, z, false, true);
      coarse_correction(r, z);
      break;
  }
}

Vector MultiplicativeDd::apply(std::span<const double> r) const {
  Vector z(size());
  apply(r, z);
  return z;
}

// ---------------------------------------------------------------------------
// Additive domain decomposition

AdditiveDd::AdditiveDd(std::shared_ptr<const Decomposition> d, DdConfig cfg)
    : d_(std::move(d)), cfg_(cfg), solvers_(*d_, cfg.solver), coarse_(factor_coarse(*d_)) {
  if (cfg_.solver == SubdomainSolverKind::adjointed)
    throw std::invalid_argument("additive DD: the adjointed solver needs a multiplicative sweep pair");
  if (!(cfg_.omega > 0.0)) throw std::invalid_argument("additive DD: omega must be positive");
  for (std::size_t k = 0; k < d_->subdomains.size(); ++k)
    cost_ += solvers_.cost(k) + static_cast<double>(d_->subdomains[k].size());
  cost_ += coarse_cost(*d_) + static_cast<double>(d_->size());
}

void AdditiveDd::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != size() || z.size() != size()) throw DimensionError("additive DD: dimension mismatch");
  Vector acc(size(), 0.0);
  for (auto i : d_->dirichlet) acc[i] = r[i];
  Vector rl, zl;
  for (std::size_t k = 0; k < d_->subdomains.size(); ++k) {
    const auto& idx = d_->subdomains[k];
    rl.resize(idx.size());
    zl.resize(idx.size());
    for (std::size_t m = 0; m < idx.size(); ++m) rl[m] = r[idx[m]];
    solvers_.solve(k, rl, zl, false);
    for (std::size_t m = 0; m < idx.size(); ++m) acc[idx[m]] += zl[m];
  }
  if (d_->coarse) {
    const auto& c = *d_->coarse;
    Vector rc(c.restriction.rows());
    c.restriction.multiply(r, rc);
    coarse_->solve_in_place(rc);
    Vector corr(size());
    c.prolongation.multiply(rc, corr);
    axpy(1.0, corr, acc);
  }
  for (std::size_t i = 0; i < acc.size(); ++i) z[i] = cfg_.omega * acc[i];
}

Vector AdditiveDd::apply(std::span<const double> r) const {
  Vector z(size());
  apply(r, z);
  return z;
}

// ---------------------------------------------------------------------------

Vector apply_mult_mg(const fem::Hierarchy& h, const MgConfig& cfg, std::span<const double> r) {
  return MultiplicativeMultigrid(borrow(h), cfg).apply(r);
}

Vector apply_add_mg(const fem::Hierarchy& h, const MgConfig& cfg, std::span<const double> r) {
  return AdditiveMultigrid(borrow(h), cfg).apply(r);
}

Vector apply_mult_dd(const Decomposition& d, const DdConfig& cfg, std::span<const double> r) {
  return MultiplicativeDd(borrow(d), cfg).apply(r);
}

Vector apply_add_dd(const Decomposition& d, const DdConfig& cfg, std::span<const double> r) {
  return AdditiveDd(borrow(d), cfg).apply(r);
}

}  // namespace schwarz
