#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "schwarz/fem.hpp"
#include "schwarz/linalg.hpp"
#include "schwarz/schwarz.hpp"
#include "schwarz/smooth.hpp"

namespace schwarz::verify {

class NonlinearOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpdCertificate {
  double symmetry_defect = 0.0;  ///< max|B - B^T| / max|B|
  double min_eig = 0.0;          ///< of (B + B^T) / 2
  double norm = 0.0;             ///< max|B_ij|
  bool probed = false;           ///< probe-based variant (large n)
  bool passed = false;

  static constexpr double symmetry_threshold = 1e-10;
  nlohmann::json to_json() const;
};

/// Dense materialization up to `dense_limit` unknowns; above it 64 random
/// pairs bound the asymmetry and a Lanczos run bounds the spectrum.
/// Throws NonlinearOperatorError when random linearity probes fail.
SpdCertificate certify_spd(const LinearOperator& b, std::size_t dense_limit = 2000);

/// ||E||_A by power iteration on E*E in the A inner product (relative
/// tolerance 1e-8, at most 5000 steps).  E* is formed densely.
double a_norm(const LinearOperator& e, const SparseMatrix& a, double tol = 1e-8, std::size_t max_steps = 5000);

/// ||E||_A = ||L^T E L^{-T}||_2 with A = L L^T.
double a_norm_dense(const DenseMatrix& e, const DenseMatrix& a);

/// Largest eigenvalue modulus from a dense nonsymmetric eigensolve.
double spectral_radius(const LinearOperator& op);
double spectral_radius(const DenseMatrix& m);

struct PenaltyReport {
  double rho_ee = 0.0;      ///< rho(E E)
  double norm_ee = 0.0;     ///< ||E E||_A
  double norm_e_sq = 0.0;   ///< ||E||_A^2
  double rho_eestar = 0.0;  ///< rho(E E*)

  bool chain_holds(double tol = 1e-8) const;
  nlohmann::json to_json() const;
};

PenaltyReport penalty_report(const DenseMatrix& e, const SparseMatrix& a);
PenaltyReport penalty_report(const LinearOperator& e, const SparseMatrix& a);

struct ConditionEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 0.0;
};

/// Extreme eigenvalues of BA in the A inner product: (A B A) x = lambda A x,
/// with A B A symmetrized.
ConditionEstimate condition_estimate(const LinearOperator& b, const SparseMatrix& a);

/// Dense matrix of r -> z, z = 0 then the sweeps of `s` on A z = r.
DenseMatrix smoother_matrix(const SmootherSchedule& s, const SparseMatrix& a);

/// min_c max|R - c P^T| / max|R| with c fitted by least squares.
struct RestrictionFit {
  double c = 0.0;
  double defect = 0.0;
};
RestrictionFit restriction_defect(const SparseMatrix& restriction, const SparseMatrix& prolongation);

/// max_k ||A_{k-1} - c_k P_k^T A_k P_k|| / ||A_{k-1}|| (max-entry norms).
double galerkin_defect(const fem::Hierarchy& h);

struct Condition {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct Checklist {
  std::string method;
  std::vector<Condition> conditions;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Symmetry and positivity conditions for the multiplicative V-cycle.
Checklist check_mult_mg(const fem::Hierarchy& h, const MgConfig& cfg);
/// Same, with the positivity conditions replaced by ||I - BA||_A < 1.
Checklist check_mult_mg_convergent(const fem::Hierarchy& h, const MgConfig& cfg);
Checklist check_add_mg(const fem::Hierarchy& h, const MgConfig& cfg);
Checklist check_mult_dd(const Decomposition& d, const DdConfig& cfg);
Checklist check_add_dd(const Decomposition& d, const DdConfig& cfg);

}  // namespace schwarz::verify
