#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace schwarz {

using Vector = std::vector<double>;
using DenseMatrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization meets a pivot that is zero to working precision.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSpdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Vector kernels

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// y <- y + alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector subtract(std::span<const double> x, std::span<const double> y);
void scale(double alpha, std::span<double> x);

// ---------------------------------------------------------------------------
// Compressed-row sparse matrix

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Builds from unordered triplets; duplicates are summed, columns sorted.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix from_dense(const DenseMatrix& m, double drop_tolerance = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  bool square() const { return rows_ == cols_; }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  /// Entry (i, j); zero when not stored.
  double coeff(std::size_t i, std::size_t j) const;

  /// y = A x, rows traversed in ascending order.
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// y = A^T x
  void multiply_transpose(std::span<const double> x, std::span<double> y) const;

  SparseMatrix transpose() const;
  SparseMatrix scaled(double alpha) const;
  Vector diagonal() const;
  DenseMatrix to_dense() const;
  double max_abs() const;

  /// Rows and columns restricted to `indices` (in the given order).
  SparseMatrix principal_submatrix(std::span<const std::size_t> indices) const;

  std::vector<Triplet> triplets() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

Vector spmv(const SparseMatrix& a, std::span<const double> x);
SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);
/// alpha * a + beta * b
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);

/// max_{ij} |a_ij - a_ji| / max_{ij} |a_ij|  (0 for the zero matrix).
double symmetry_defect(const SparseMatrix& a);
double symmetry_defect(const DenseMatrix& a);

// ---------------------------------------------------------------------------
// Matrix-free linear maps

class LinearOperator {
 public:
  using Kernel = std::function<void(std::span<const double>, std::span<double>)>;

  LinearOperator() = default;
  LinearOperator(std::size_t rows, std::size_t cols, Kernel kernel, double cost = 0.0);

  static LinearOperator from_matrix(SparseMatrix a);
  static LinearOperator from_dense(DenseMatrix a);
  static LinearOperator identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  Vector operator()(std::span<const double> x) const;

  /// Floating-point operations per application (work model, not measured).
  double cost() const { return cost_; }
  void set_cost(double cost) { cost_ = cost; }

  /// alpha * this
  LinearOperator scaled(double alpha) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Kernel kernel_;
  double cost_ = 0.0;
};

/// Column j of the result is op(e_j).
DenseMatrix materialize(const LinearOperator& op);

/// Error propagator I - B A as an operator.
LinearOperator error_propagator(const LinearOperator& b, const SparseMatrix& a);

// ---------------------------------------------------------------------------
// Dense factorization

/// LU with partial (row) pivoting.
class LuFactorization {
 public:
  LuFactorization() = default;
  /// Throws SingularMatrixError if a pivot falls below tolerance * max|A|.
  explicit LuFactorization(DenseMatrix a, double relative_pivot_tolerance = 1e-13);

  std::size_t size() const { return static_cast<std::size_t>(lu_.rows()); }
  void solve_in_place(std::span<double> b) const;
  Vector solve(std::span<const double> b) const;
  DenseMatrix solve(const DenseMatrix& b) const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
};

Vector dense_solve(const DenseMatrix& a, std::span<const double> b);

// ---------------------------------------------------------------------------
// SPD checks, inner products, adjoints

struct SpdSmokeTest {
  double symmetry_defect = 0.0;
  double min_ritz = 0.0;
  double max_ritz = 0.0;
  bool passed = false;
};

/// Extreme Ritz values of a symmetric operator from `steps` Lanczos steps
/// (full reorthogonalization, fixed random start).
std::pair<double, double> lanczos_extreme_ritz(const LinearOperator& op, std::size_t steps = 50,
                                               unsigned seed = 7);

/// Symmetry defect < 1e-12 and smallest Lanczos Ritz value of the
/// symmetric part > 0.
SpdSmokeTest spd_smoke_test(const SparseMatrix& a);

class InnerProduct {
 public:
  enum class Kind { euclidean, a_weighted };

  static InnerProduct euclidean();
  /// Throws NotSpdError if `a` fails the SPD smoke test.
  static InnerProduct a_weighted(SparseMatrix a);

  Kind kind() const { return kind_; }
  double operator()(std::span<const double> x, std::span<const double> y) const;

 private:
  Kind kind_ = Kind::euclidean;
  std::shared_ptr<const SparseMatrix> a_;
};

double inner(const InnerProduct& ip, std::span<const double> x, std::span<const double> y);

/// ||x||_A = sqrt((A x, x))
double energy_norm(const SparseMatrix& a, std::span<const double> x);

/// A-adjoint M* = A^{-1} M^T A.  Throws NotSpdError when A fails the smoke test.
DenseMatrix a_adjoint(const DenseMatrix& m, const SparseMatrix& a);

}  // namespace schwarz
