#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "schwarz/fem.hpp"
#include "schwarz/linalg.hpp"
#include "schwarz/smooth.hpp"

namespace schwarz {

/// V-cycle smoothing.  Additive multigrid uses pre followed by post as its
/// per-level smoother and scales the sum by omega.
struct MgConfig {
  SmootherSchedule pre;
  SmootherSchedule post;
  double omega = 1.0;
};

/// B of the multiplicative V-cycle: pre-smooth from zero, restrict the
/// residual, recurse, prolong and add, post-smooth; exact coarsest solve.
class MultiplicativeMultigrid {
 public:
  MultiplicativeMultigrid(std::shared_ptr<const fem::Hierarchy> h, MgConfig cfg);

  void apply(std::span<const double> r, std::span<double> z) const;
  Vector apply(std::span<const double> r) const;
  std::size_t size() const { return h_->size(); }
  double cost() const { return cost_; }
  const MgConfig& config() const { return cfg_; }

 private:
  void cycle(std::size_t k, std::span<const double> r, std::span<double> z) const;

  std::shared_ptr<const fem::Hierarchy> h_;
  MgConfig cfg_;
  LuFactorization coarse_;
  double cost_ = 0.0;
};

/// B = omega * sum_k I_k R_k c_k I_k^T with the exact solve on level 0.
class AdditiveMultigrid {
 public:
  AdditiveMultigrid(std::shared_ptr<const fem::Hierarchy> h, MgConfig cfg);

  void apply(std::span<const double> r, std::span<double> z) const;
  Vector apply(std::span<const double> r) const;
  std::size_t size() const { return h_->size(); }
  double cost() const { return cost_; }
  const SmootherSchedule& smoother() const { return smoother_; }

 private:
  std::shared_ptr<const fem::Hierarchy> h_;
  SmootherSchedule smoother_;
  double omega_;
  LuFactorization coarse_;
  double cost_ = 0.0;
};

/// Overlapping subdomains on the finest level plus an optional coarse space.
struct Decomposition {
  struct Coarse {
    SparseMatrix prolongation;  ///< coarse -> fine
    SparseMatrix restriction;   ///< c * prolongation^T
    SparseMatrix a;
    double scaling = 1.0;
  };

  std::shared_ptr<const SparseMatrix> a;
  std::vector<std::vector<std::size_t>> subdomains;  ///< ascending fine indices
  std::vector<SparseMatrix> local;                   ///< principal submatrices
  std::vector<std::size_t> dirichlet;                ///< rows of A that are identity rows
  std::optional<Coarse> coarse;

  std::size_t size() const { return a->rows(); }
};

class EmptySubdomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One subdomain per coarsest element: the vertices of its descendant fine
/// triangles, grown by `overlap` layers of fine triangles touching the set,
/// Dirichlet vertices removed.  The coarse space is hierarchy level 0.
Decomposition build_decomposition(const fem::Hierarchy& h, std::size_t overlap = 1, bool coarse_space = true);

enum class DdSweep { forw, forw_back, forw_forw };

DdSweep parse_sweep(std::string_view name);
std::string to_string(DdSweep sweep);

struct DdConfig {
  SubdomainSolverKind solver = SubdomainSolverKind::exact;
  DdSweep sweep = DdSweep::forw_back;
  double omega = 1.0;
  /// Coarse corrections applied back to back at each coarse visit.
  int coarse_visits = 1;
};

/// Local solves shared by both domain decomposition forms.
class SubdomainSolvers {
 public:
  SubdomainSolvers(const Decomposition& d, SubdomainSolverKind kind);
  /// z = R_k r for subdomain k; `reverse_pass` selects the adjoint schedule
  /// of the adjointed solver.
  void solve(std::size_t k, std::span<const double> r, std::span<double> z, bool reverse_pass) const;
  double cost(std::size_t k) const;

 private:
  const Decomposition* d_;
  SubdomainSolverKind kind_;
  std::vector<LuFactorization> lu_;
};

/// B of the multiplicative sweep over the subdomains with the coarse
/// correction after each forward pass (between the passes for forw_back).
class MultiplicativeDd {
 public:
  MultiplicativeDd(std::shared_ptr<const Decomposition> d, DdConfig cfg);

  void apply(std::span<const double> r, std::span<double> z) const;
  Vector apply(std::span<const double> r) const;
  std::size_t size() const { return d_->size(); }
  double cost() const { return cost_; }

 private:
  /// `second` marks the pass after the coarse correction, which runs the
  /// adjoint schedule of the adjointed solver.
  void pass(std::span<const double> r, std::span<double> u, bool reverse, bool second) const;
  void coarse_correction(std::span<const double> r, std::span<double> u) const;

  std::shared_ptr<const Decomposition> d_;
  DdConfig cfg_;
  SubdomainSolvers solvers_;
  std::optional<LuFactorization> coarse_;
  double cost_ = 0.0;
};

/// B = omega * (sum_k I_k R_k I_k^T + I_0 A_0^{-1} c I_0^T).
class AdditiveDd {
 public:
  AdditiveDd(std::shared_ptr<const Decomposition> d, DdConfig cfg);

  void apply(std::span<const double> r, std::span<double> z) const;
  Vector apply(std::span<const double> r) const;
  std::size_t size() const { return d_->size(); }
  double cost() const { return cost_; }

 private:
  std::shared_ptr<const Decomposition> d_;
  DdConfig cfg_;
  SubdomainSolvers solvers_;
  std::optional<LuFactorization> coarse_;
  double cost_ = 0.0;
};

template <class Preconditioner>
LinearOperator as_operator(std::shared_ptr<const Preconditioner> p) {
  const std::size_t n = p->size();
  const double cost = p->cost();
  return LinearOperator(
      n, n, [p = std::move(p)](std::span<const double> x, std::span<double> y) { p->apply(x, y); }, cost);
}

Vector apply_mult_mg(const fem::Hierarchy& h, const MgConfig& cfg, std::span<const double> r);
Vector apply_add_mg(const fem::Hierarchy& h, const MgConfig& cfg, std::span<const double> r);
Vector apply_mult_dd(const Decomposition& d, const DdConfig& cfg, std::span<const double> r);
Vector apply_add_dd(const Decomposition& d, const DdConfig& cfg, std::span<const double> r);

}  // namespace schwarz
