#include "schwarz/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace schwarz {

namespace {

void require_size(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                         ", got " + std::to_string(actual));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vector kernels

double dot(std::span<const double> x, std::span<const double> y) {
  require_size(y.size(), x.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_size(y.size(), x.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector subtract(std::span<const double> x, std::span<const double> y) {
  require_size(y.size(), x.size(), "subtract");
  Vector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  for (const auto& t : entries) {
    if (t.row >= rows || t.col >= cols) {
      throw DimensionError("SparseMatrix: entry (" + std::to_string(t.row) + "," +
                           std::to_string(t.col) + ") outside " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(rows + 1, 0);
  col_idx_.reserve(entries.size());
  values_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size();) {
    std::size_t r = entries[k].row;
    std::size_t c = entries[k].col;
    double v = 0.0;
    while (k < entries.size() && entries[k].row == r && entries[k].col == c) v += entries[k++].value;
    col_idx_.push_back(c);
    values_.push_back(v);
    ++row_ptr_[r + 1];
  }
  std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return SparseMatrix(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& m, double drop_tolerance) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > drop_tolerance)
        t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j)});
  return SparseMatrix(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()),
                      std::move(t));
}

double SparseMatrix::coeff(std::size_t i, std::size_t j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), cols_, "spmv input");
  require_size(y.size(), rows_, "spmv output");
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), rows_, "spmv^T input");
  require_size(y.size(), cols_, "spmv^T output");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) y[col_idx_[k]] += values_[k] * x[i];
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.push_back({i, col_idx_[k], values_[k]});
  return t;
}

SparseMatrix SparseMatrix::transpose() const {
  auto t = triplets();
  for (auto& e : t) std::swap(e.row, e.col);
  return SparseMatrix(cols_, rows_, std::move(t));
}

SparseMatrix SparseMatrix::scaled(double alpha) const {
  SparseMatrix s = *this;
  for (double& v : s.values_) v *= alpha;
  return s;
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = coeff(i, i);
  return d;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_idx_[k])) += values_[k];
  return m;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

SparseMatrix SparseMatrix::principal_submatrix(std::span<const std::size_t> indices) const {
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(cols_, npos);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= rows_ || indices[k] >= cols_) throw DimensionError("principal_submatrix: index out of range");
    local[indices[k]] = k;
  }
  std::vector<Triplet> t;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    std::size_t i = indices[k];
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (local[col_idx_[p]] != npos) t.push_back({k, local[col_idx_[p]], values_[p]});
  }
  return SparseMatrix(indices.size(), indices.size(), std::move(t));
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  Vector y(a.rows());
  a.multiply(x, y);
  return y;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("sparse product: inner dimensions differ");
  std::vector<Triplet> t;
  std::vector<double> acc(b.cols(), 0.0);
  std::vector<char> used(b.cols(), 0);
  std::vector<std::size_t> pattern;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    pattern.clear();
    auto acols = a.row_cols(i);
    auto avals = a.row_values(i);
    for (std::size_t p = 0; p < acols.size(); ++p) {
      std::size_t k = acols[p];
      auto bcols = b.row_cols(k);
      auto bvals = b.row_values(k);
      for (std::size_t q = 0; q < bcols.size(); ++q) {
        std::size_t j = bcols[q];
        if (!used[j]) {
          used[j] = 1;
          pattern.push_back(j);
        }
        acc[j] += avals[p] * bvals[q];
      }
    }
    for (std::size_t j : pattern) {
      t.push_back({i, j, acc[j]});
      acc[j] = 0.0;
      used[j] = 0;
    }
  }
  return SparseMatrix(a.rows(), b.cols(), std::move(t));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("sparse add: shapes differ");
  auto t = a.triplets();
  for (auto& e : t) e.value *= alpha;
  for (auto e : b.triplets()) {
    e.value *= beta;
    t.push_back(e);
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(t));
}

double symmetry_defect(const SparseMatrix& a) {
  if (!a.square()) throw DimensionError("symmetry_defect: matrix not square");
  double scale_ = a.max_abs();
  if (scale_ == 0.0) return 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t p = 0; p < cols.size(); ++p) d = std::max(d, std::abs(vals[p] - a.coeff(cols[p], i)));
  }
  return d / scale_;
}

double symmetry_defect(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("symmetry_defect: matrix not square");
  double scale_ = a.cwiseAbs().maxCoeff();
  if (a.size() == 0 || scale_ == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale_;
}

// ---------------------------------------------------------------------------
// LinearOperator

LinearOperator::LinearOperator(std::size_t rows, std::size_t cols, Kernel kernel, double cost)
    : rows_(rows), cols_(cols), kernel_(std::move(kernel)), cost_(cost) {}

LinearOperator LinearOperator::from_matrix(SparseMatrix a) {
  auto m = std::make_shared<const SparseMatrix>(std::move(a));
  return LinearOperator(
      m->rows(), m->cols(), [m](std::span<const double> x, std::span<double> y) { m->multiply(x, y); },
      2.0 * static_cast<double>(m->nnz()));
}

LinearOperator LinearOperator::from_dense(DenseMatrix a) {
  auto m = std::make_shared<const DenseMatrix>(std::move(a));
  return LinearOperator(
      static_cast<std::size_t>(m->rows()), static_cast<std::size_t>(m->cols()),
      [m](std::span<const double> x, std::span<double> y) {
        Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
        yv.noalias() = (*m) * xv;
      },
      2.0 * static_cast<double>(m->size()));
}

LinearOperator LinearOperator::identity(std::size_t n) {
  return LinearOperator(n, n, [](std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), y.begin());
  });
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
  require_size(x.size(), cols_, "operator input");
  require_size(y.size(), rows_, "operator output");
  kernel_(x, y);
}

Vector LinearOperator::operator()(std::span<const double> x) const {
  Vector y(rows_, 0.0);
  apply(x, y);
  return y;
}

LinearOperator LinearOperator::scaled(double alpha) const {
  auto inner_ = kernel_;
  return LinearOperator(
      rows_, cols_,
      [inner_, alpha](std::span<const double> x, std::span<double> y) {
        inner_(x, y);
        for (double& v : y) v *= alpha;
      },
      cost_ + static_cast<double>(rows_));
}

DenseMatrix materialize(const LinearOperator& op) {
  const auto n = op.cols();
  DenseMatrix m(static_cast<Eigen::Index>(op.rows()), static_cast<Eigen::Index>(n));
  Vector e(n, 0.0);
  Vector col(op.rows(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    for (std::size_t i = 0; i < op.rows(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    e[j] = 0.0;
  }
  return m;
}

LinearOperator error_propagator(const LinearOperator& b, const SparseMatrix& a) {
  if (b.cols() != a.rows() || b.rows() != a.cols()) throw DimensionError("error_propagator: shapes differ");
  auto am = std::make_shared<const SparseMatrix>(a);
  return LinearOperator(a.cols(), a.cols(), [b, am](std::span<const double> x, std::span<double> y) {
    Vector ax = spmv(*am, x);
    Vector bax = b(ax);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - bax[i];
  });
}

// ---------------------------------------------------------------------------
// LU with partial pivoting

LuFactorization::LuFactorization(DenseMatrix a, double relative_pivot_tolerance) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw DimensionError("LuFactorization: matrix not square");
  const Eigen::Index n = lu_.rows();
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double threshold = relative_pivot_tolerance * (n > 0 ? lu_.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    double best = std::abs(lu_(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        piv = i;
      }
    }
    if (!(best > threshold)) {
      throw SingularMatrixError("LU: pivot " + std::to_string(best) + " at step " + std::to_string(k) +
                                " is below tolerance; operator is not invertible");
    }
    if (piv != k) {
      lu_.row(k).swap(lu_.row(piv));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(piv)]);
    }
    const double inv = 1.0 / lu_(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double l = lu_(i, k) * inv;
      lu_(i, k) = l;
      if (l != 0.0) lu_.row(i).tail(n - k - 1) -= l * lu_.row(k).tail(n - k - 1);
    }
  }
}

void LuFactorization::solve_in_place(std::span<double> b) const {
  const auto n = size();
  require_size(b.size(), n, "LU solve");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    double s = y[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(static_cast<Eigen::Index>(ii), static_cast<Eigen::Index>(j)) * y[j];
    y[ii] = s / lu_(static_cast<Eigen::Index>(ii), static_cast<Eigen::Index>(ii));
  }
  std::copy(y.begin(), y.end(), b.begin());
}

Vector LuFactorization::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

DenseMatrix LuFactorization::solve(const DenseMatrix& b) const {
  DenseMatrix x(b.rows(), b.cols());
  Vector col(static_cast<std::size_t>(b.rows()));
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) col[static_cast<std::size_t>(i)] = b(i, j);
    solve_in_place(col);
    for (Eigen::Index i = 0; i < b.rows(); ++i) x(i, j) = col[static_cast<std::size_t>(i)];
  }
  return x;
}

Vector dense_solve(const DenseMatrix& a, std::span<const double> b) { return LuFactorization(a).solve(b); }

// ---------------------------------------------------------------------------
// Lanczos / SPD smoke test

std::pair<double, double> lanczos_extreme_ritz(const LinearOperator& op, std::size_t steps, unsigned seed) {
  const std::size_t n = op.rows();
  if (n == 0) return {0.0, 0.0};
  steps = std::min(steps, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Vector> basis;
  Vector q(n);
  for (double& v : q) v = dist(rng);
  scale(1.0 / norm2(q), q);
  std::vector<double> alpha, beta;
  Vector w(n);
  for (std::size_t k = 0; k < steps; ++k) {
    basis.push_back(q);
    op.apply(q, w);
    double a = dot(w, q);
    alpha.push_back(a);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) axpy(-dot(w, v), v, w);
    double b = norm2(w);
    if (k + 1 == steps || b < 1e-12 * std::max(1.0, std::abs(a))) break;
    beta.push_back(b);
    for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
  }
  const auto m = static_cast<Eigen::Index>(alpha.size());
  DenseMatrix t = DenseMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(t, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

SpdSmokeTest spd_smoke_test(const SparseMatrix& a) {
  if (!a.square()) throw DimensionError("spd_smoke_test: matrix not square");
  SpdSmokeTest r;
  r.symmetry_defect = symmetry_defect(a);
  auto am = std::make_shared<const SparseMatrix>(a);
  LinearOperator sym(a.rows(), a.cols(), [am](std::span<const double> x, std::span<double> y) {
    am->multiply(x, y);
    Vector t(y.size());
    am->multiply_transpose(x, t);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.5 * (y[i] + t[i]);
  });
  std::tie(r.min_ritz, r.max_ritz) = lanczos_extreme_ritz(sym, 50);
  r.passed = r.symmetry_defect < 1e-12 && r.min_ritz > 0.0;
  return r;
}

InnerProduct InnerProduct::euclidean() { return InnerProduct{}; }

InnerProduct InnerProduct::a_weighted(SparseMatrix a) {
  auto smoke = spd_smoke_test(a);
  if (!smoke.passed) {
    throw NotSpdError("a_weighted inner product: matrix fails SPD smoke test (symmetry defect " +
                      std::to_string(smoke.symmetry_defect) + ", min Ritz " + std::to_string(smoke.min_ritz) + ")");
  }
  InnerProduct ip;
  ip.kind_ = Kind::a_weighted;
  ip.a_ = std::make_shared<const SparseMatrix>(std::move(a));
  return ip;
}

double InnerProduct::operator()(std::span<const double> x, std::span<const double> y) const {
  require_size(y.size(), x.size(), "inner");
  if (kind_ == Kind::euclidean) return dot(x, y);
  return dot(spmv(*a_, x), y);
}

double inner(const InnerProduct& ip, std::span<const double> x, std::span<const double> y) { return ip(x, y); }

double energy_norm(const SparseMatrix& a, std::span<const double> x) {
  return std::sqrt(std::max(0.0, dot(spmv(a, x), x)));
}

DenseMatrix a_adjoint(const DenseMatrix& m, const SparseMatrix& a) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != a.rows())
    throw DimensionError("a_adjoint: dimensions differ");
  auto smoke = spd_smoke_test(a);
  if (!smoke.passed) throw NotSpdError("a_adjoint: A fails SPD smoke test");
  DenseMatrix ad = a.to_dense();
  LuFactorization lu(ad);
  return lu.solve(DenseMatrix(m.transpose() * ad));
}

}  // namespace schwarz
