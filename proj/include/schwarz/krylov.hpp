#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "schwarz/linalg.hpp"

namespace schwarz {

enum class StopReason { tolerance, max_iterations, breakdown, divergence };

std::string to_string(StopReason reason);

struct StoppingRule {
  enum class Mode { a_norm_error, residual };

  Mode mode = Mode::a_norm_error;
  /// Exact discrete solution; required in a_norm_error mode.
  Vector reference;
  double tol = 1e-10;
  std::size_t max_iterations = 100;
  double divergence_factor = 1e6;

  static StoppingRule a_norm(Vector reference, std::size_t max_iterations, double tol = 1e-10);
  static StoppingRule residual(std::size_t max_iterations, double tol = 1e-10);
};

struct SolveReport {
  std::string method;
  std::size_t iterations = 0;
  /// ||u - u_k||_A / ||u - u_0||_A, or ||r_k|| / ||r_0|| in residual mode.
  std::vector<double> error_ratio;
  /// ||f - A u_k||_2
  std::vector<double> residual_norm;
  bool converged = false;
  StopReason reason = StopReason::max_iterations;
  Vector solution;
  /// Flops of one iteration under the work model.
  double work_per_iteration = 0.0;
  /// Bi-CGstab stopped after the first half of its last iteration, which
  /// still counts as one iteration but costs half the work.
  bool half_step = false;

  double total_work() const {
    return work_per_iteration * (static_cast<double>(iterations) - (half_step ? 0.5 : 0.0));
  }
  /// Geometric mean of the per-step error reduction.
  double mean_ratio() const;
  nlohmann::json to_json() const;
};

/// How a stationary step is counted.  `native` methods (multiplicative
/// sweeps) update the iterate in place, so no separate residual is formed.
enum class StationaryForm { correction, native };

/// u <- u + omega B (f - A u) from u = 0.
SolveReport stationary_solve(const SparseMatrix& a, const LinearOperator& b, std::span<const double> f,
                             double omega, const StoppingRule& rule,
                             StationaryForm form = StationaryForm::correction);

/// Preconditioned conjugate gradients from u = 0.  B need not be symmetric;
/// breakdown is reported when (p, Ap) or (r, Br) stops being usable.
SolveReport pcg_solve(const SparseMatrix& a, const LinearOperator& b, std::span<const double> f,
                      const StoppingRule& rule);

/// Bi-CGstab on B A u = B f from u = 0; breakdown when |rho| < 1e-30 ||r_0||^2
/// or the stabilization scalar vanishes.
SolveReport bicgstab_solve(const SparseMatrix& a, const LinearOperator& b, std::span<const double> f,
                           const StoppingRule& rule);

}  // namespace schwarz
