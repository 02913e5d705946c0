#pragma once

#include <memory>
#include <random>

#include "schwarz/fem.hpp"
#include "schwarz/linalg.hpp"
#include "schwarz/problems.hpp"
#include "schwarz/schwarz.hpp"

namespace testing {

using namespace schwarz;

inline SparseMatrix tridiag(std::size_t n, double lo = -1.0, double mid = 2.0, double hi = -1.0) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, mid});
    if (i > 0) t.push_back({i, i - 1, lo});
    if (i + 1 < n) t.push_back({i, i + 1, hi});
  }
  return SparseMatrix(n, n, std::move(t));
}

inline DenseMatrix random_dense(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = g(rng);
  return m;
}

/// Q^T Q + n I
inline DenseMatrix random_spd(std::size_t n, std::mt19937_64& rng) {
  DenseMatrix q = random_dense(n, rng);
  return q.transpose() * q + static_cast<double>(n) * DenseMatrix::Identity(n, n);
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline double max_abs(const DenseMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Laplace on the unit square, 3x3 base cells.
inline std::shared_ptr<const fem::Hierarchy> square_hierarchy(std::size_t levels) {
  return std::make_shared<const fem::Hierarchy>(fem::build_hierarchy(
      problems::laplace_problem(), problems::unit_square_mesh(3), levels, fem::CoarseMode::galerkin));
}

/// Error propagator of one Gauss-Seidel sweep from the splitting A = D + L + U.
inline DenseMatrix sweep_propagator(const DenseMatrix& a, char direction) {
  DenseMatrix m = direction == 'f' ? DenseMatrix(a.triangularView<Eigen::Lower>())
                                   : DenseMatrix(a.triangularView<Eigen::Upper>());
  return DenseMatrix::Identity(a.rows(), a.cols()) - m.inverse() * a;
}

/// Error propagator of a sweep sequence, first letter applied first.
inline DenseMatrix schedule_propagator(const std::string& seq, const DenseMatrix& a) {
  DenseMatrix e = DenseMatrix::Identity(a.rows(), a.cols());
  for (char c : seq) e = (sweep_propagator(a, c) * e).eval();
  return e;
}

template <class P>
DenseMatrix materialized(const P& p) {
  auto op = LinearOperator(p.size(), p.size(), [&p](std::span<const double> x, std::span<double> y) { p.apply(x, y); });
  return materialize(op);
}

}  // namespace testing
