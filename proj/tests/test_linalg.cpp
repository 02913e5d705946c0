#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace schwarz;
using namespace testing;
using Catch::Approx;

TEST_CASE("spmv reproduces hand examples") {
  auto id = SparseMatrix::identity(3);
  CHECK(spmv(id, Vector{1, 2, 3}) == Vector{1, 2, 3});
  CHECK(spmv(tridiag(3), Vector{1, 1, 1}) == Vector{1, 0, 1});
}

TEST_CASE("spmv matches a dense product") {
  std::mt19937_64 rng(1);
  DenseMatrix d = random_dense(5, rng);
  d = (d + d.transpose()).eval();
  auto a = SparseMatrix::from_dense(d);
  Vector x = random_vector(5, rng);
  Vector y = spmv(a, x);
  for (std::size_t i = 0; i < 5; ++i) {
    double ref = 0.0;
    for (std::size_t j = 0; j < 5; ++j) ref += d(i, j) * x[j];
    CHECK(std::abs(y[i] - ref) <= 1e-14 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("spmv on symmetric A is self-adjoint") {
  std::mt19937_64 rng(2);
  auto a = SparseMatrix::from_dense(random_spd(40, rng));
  Vector x = random_vector(40, rng), y = random_vector(40, rng);
  const double l = dot(spmv(a, x), y), r = dot(x, spmv(a, y));
  CHECK(std::abs(l - r) <= 1e-13 * std::abs(l));
}

TEST_CASE("sparse construction sums duplicates and rejects bad indices") {
  SparseMatrix a(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, -1.0}});
  CHECK(a.coeff(0, 0) == 3.0);
  CHECK(a.coeff(1, 0) == -1.0);
  CHECK(a.coeff(0, 1) == 0.0);
  CHECK_THROWS_AS(SparseMatrix(2, 2, {{2, 0, 1.0}}), DimensionError);
  CHECK_THROWS_AS(spmv(a, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("sparse products and transposes agree with dense") {
  std::mt19937_64 rng(3);
  DenseMatrix x = random_dense(6, rng), y = random_dense(6, rng);
  auto a = SparseMatrix::from_dense(x), b = SparseMatrix::from_dense(y);
  CHECK(max_abs(multiply(a, b).to_dense() - x * y) < 1e-12);
  CHECK(max_abs(a.transpose().to_dense() - x.transpose()) == 0.0);
  CHECK(max_abs(add(a, b, 2.0, -1.0).to_dense() - (2.0 * x - y)) < 1e-14);
  CHECK(symmetry_defect(SparseMatrix::from_dense(x + x.transpose())) == 0.0);
}

TEST_CASE("euclidean and energy inner products") {
  auto e = InnerProduct::euclidean();
  CHECK(e(Vector{3, 4}, Vector{3, 4}) == 25.0);
  auto w = InnerProduct::a_weighted(SparseMatrix::identity(2).scaled(2.0));
  CHECK(w(Vector{1, 0}, Vector{1, 0}) == 2.0);

  std::mt19937_64 rng(4);
  auto a = SparseMatrix::from_dense(random_spd(20, rng));
  auto ip = InnerProduct::a_weighted(a);
  for (int k = 0; k < 5; ++k) {
    Vector x = random_vector(20, rng), y = random_vector(20, rng);
    CHECK(std::abs(ip(x, y) - ip(y, x)) < 1e-13 * std::abs(ip(x, x)));
  }
  CHECK_THROWS_AS(InnerProduct::a_weighted(tridiag(4, -1.0, -2.0, -1.0)), NotSpdError);
}

TEST_CASE("dense solve") {
  CHECK(dense_solve(DenseMatrix::Identity(4, 4), Vector{1, 2, 3, 4}) == Vector{1, 2, 3, 4});
  DenseMatrix m(2, 2);
  m << 2, 1, 1, 2;
  auto x = dense_solve(m, Vector{3, 3});
  CHECK(x[0] == Approx(1.0).epsilon(1e-15));
  CHECK(x[1] == Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(5);
  DenseMatrix s = random_spd(10, rng);
  Vector b = random_vector(10, rng);
  Vector sol = dense_solve(s, b);
  Eigen::VectorXd r = s * Eigen::Map<Eigen::VectorXd>(sol.data(), 10) - Eigen::Map<Eigen::VectorXd>(b.data(), 10);
  CHECK(r.norm() < 1e-10);
  CHECK_THROWS_AS(dense_solve(DenseMatrix::Zero(3, 3), Vector{1, 1, 1}), SingularMatrixError);
}

TEST_CASE("materialize") {
  auto a = tridiag(5);
  CHECK(max_abs(materialize(LinearOperator::from_matrix(a)) - a.to_dense()) == 0.0);
  CHECK(max_abs(materialize(LinearOperator::identity(5)) - DenseMatrix::Identity(5, 5)) == 0.0);

  std::mt19937_64 rng(6);
  auto op = LinearOperator::from_dense(random_dense(8, rng));
  for (int k = 0; k < 5; ++k) {
    Vector x = random_vector(8, rng), y = random_vector(8, rng), xy(8);
    for (std::size_t i = 0; i < 8; ++i) xy[i] = x[i] + y[i];
    Vector lhs = op(xy), ox = op(x), oy = op(y);
    double defect = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      defect = std::max(defect, std::abs(lhs[i] - ox[i] - oy[i]));
      scale = std::max(scale, std::abs(lhs[i]));
    }
    CHECK(defect <= 1e-12 * scale);
  }
}

TEST_CASE("error propagator of the exact inverse vanishes") {
  auto a = tridiag(6);
  auto inv = LinearOperator::from_dense(a.to_dense().inverse());
  CHECK(max_abs(materialize(error_propagator(inv, a))) < 1e-12);
}

TEST_CASE("A-adjoint") {
  std::mt19937_64 rng(7);
  DenseMatrix m = random_dense(6, rng);
  m = (m + m.transpose()).eval();
  CHECK(max_abs(a_adjoint(m, SparseMatrix::identity(6)) - m) < 1e-14);

  const std::size_t n = 30;
  auto a = SparseMatrix::from_dense(random_spd(n, rng));
  DenseMatrix e = random_dense(n, rng);
  DenseMatrix es = a_adjoint(e, a);
  auto ip = InnerProduct::a_weighted(a);
  for (int k = 0; k < 5; ++k) {
    Vector u = random_vector(n, rng), v = random_vector(n, rng);
    Eigen::Map<Eigen::VectorXd> um(u.data(), n), vm(v.data(), n);
    Eigen::VectorXd mu = e * um, msv = es * vm;
    const double l = ip(std::span<const double>(mu.data(), n), v);
    const double r = ip(u, std::span<const double>(msv.data(), n));
    CHECK(std::abs(l - r) <= 1e-11 * std::max(1.0, std::abs(l)));
  }
  CHECK(max_abs(a_adjoint(es, a) - e) <= 1e-10 * max_abs(e));
}

TEST_CASE("spectral radius equals the 2-norm for symmetric matrices") {
  std::mt19937_64 rng(8);
  DenseMatrix m = random_dense(12, rng);
  m = (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  CHECK(std::abs(rho - svd.singularValues()(0)) < 1e-10 * rho);
}

TEST_CASE("Lanczos Ritz values bracket the spectrum") {
  auto a = tridiag(30);
  auto [lo, hi] = lanczos_extreme_ritz(LinearOperator::from_matrix(a), 30);
  const double pi = std::acos(-1.0);
  CHECK(lo == Approx(2.0 - 2.0 * std::cos(pi / 31.0)).epsilon(1e-8));
  CHECK(hi == Approx(2.0 + 2.0 * std::cos(pi / 31.0)).epsilon(1e-8));
  CHECK(spd_smoke_test(a).passed);
  CHECK_FALSE(spd_smoke_test(tridiag(5, -1.0, 2.0, 0.0)).passed);
}
