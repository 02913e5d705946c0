#include <catch2/catch_amalgamated.hpp>

#include "schwarz/smooth.hpp"
#include "schwarz/verify.hpp"
#include "support.hpp"

using namespace schwarz;
using namespace testing;

namespace {

/// Error propagator of the materialized smoother M: I - M A.
DenseMatrix smoother_propagator(const SmootherSchedule& s, const SparseMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  return DenseMatrix::Identity(n, n) - verify::smoother_matrix(s, a) * a.to_dense();
}

}  // namespace

TEST_CASE("Gauss-Seidel sweeps by hand") {
  SparseMatrix d(2, 2, {{0, 0, 2.0}, {1, 1, 4.0}});
  Vector x{0, 0};
  gs_sweep(d, x, Vector{2, 4}, SweepDirection::forward);
  CHECK(x == Vector{1, 1});

  Vector y{0, 0, 0};
  gs_sweep(tridiag(3), y, Vector{1, 1, 1}, SweepDirection::forward);
  CHECK(y[0] == 0.5);
  CHECK(y[1] == 0.75);
  CHECK(y[2] == 0.875);

  SparseMatrix z(2, 2, {{0, 1, 1.0}, {1, 1, 1.0}});
  Vector w{0, 0};
  CHECK_THROWS_AS(gs_sweep(z, w, Vector{1, 1}, SweepDirection::forward), ZeroDiagonalError);
}

TEST_CASE("sweep propagators match the splitting formula") {
  std::mt19937_64 rng(11);
  auto a = SparseMatrix::from_dense(random_spd(12, rng));
  const DenseMatrix ad = a.to_dense();
  CHECK(max_abs(smoother_propagator(SmootherSchedule("f"), a) - sweep_propagator(ad, 'f')) < 1e-13);
  CHECK(max_abs(smoother_propagator(SmootherSchedule("b"), a) - sweep_propagator(ad, 'b')) < 1e-13);
  DenseMatrix ef = sweep_propagator(ad, 'f');
  CHECK(max_abs(smoother_propagator(SmootherSchedule("ff"), a) - ef * ef) < 1e-13);
}

TEST_CASE("schedules compose left to right") {
  auto a = tridiag(7);
  std::mt19937_64 rng(12);
  Vector b = random_vector(7, rng), x0 = random_vector(7, rng);
  Vector s1 = x0;
  apply_schedule(SmootherSchedule("fb"), a, s1, b);
  Vector s2 = x0;
  gs_sweep(a, s2, b, SweepDirection::forward);
  gs_sweep(a, s2, b, SweepDirection::backward);
  CHECK(s1 == s2);

  Vector same = x0;
  apply_schedule(SmootherSchedule(""), a, same, b);
  CHECK(same == x0);
  CHECK(smoothed(SmootherSchedule("fb"), a, x0, b) == s1);
}

TEST_CASE("schedule parsing and adjoints") {
  CHECK(SmootherSchedule("f").adjoint().sequence() == "b");
  CHECK(adjoint_schedule(SmootherSchedule("ffb")).sequence() == "fbb");
  CHECK(SmootherSchedule("ffbb").self_adjoint());
  CHECK(SmootherSchedule("0").empty());
  CHECK(SmootherSchedule("").label() == "0");
  CHECK_THROWS_AS(SmootherSchedule("fx"), std::invalid_argument);
  CHECK((SmootherSchedule("f") + SmootherSchedule("b")).sequence() == "fb");
}

TEST_CASE("adjoint schedule materializes to the transpose") {
  auto a = SparseMatrix::from_dense([] {
    std::mt19937_64 rng(13);
    return random_spd(10, rng);
  }());
  for (const char* s : {"f", "ff", "fbf", "ffb", "bbf"}) {
    SmootherSchedule sch(s);
    DenseMatrix m = verify::smoother_matrix(sch, a);
    DenseMatrix ma = verify::smoother_matrix(sch.adjoint(), a);
    CHECK(max_abs(ma - m.transpose()) < 1e-13);
  }
  for (const char* s : {"fb", "ffbb", "fbfb"}) {
    DenseMatrix m = verify::smoother_matrix(SmootherSchedule(s), a);
    CHECK(symmetry_defect(m) < 1e-12);
  }
}

TEST_CASE("subdomain solver schedules") {
  using K = SubdomainSolverKind;
  CHECK(subdomain_schedule(K::exact, false).empty());
  CHECK(subdomain_schedule(K::symmetric, false).sequence() == "fbfb");
  CHECK(subdomain_schedule(K::nonsymmetric, true).sequence() == "ffff");
  CHECK(subdomain_schedule(K::adjointed, false).sequence() == "ffff");
  CHECK(subdomain_schedule(K::adjointed, true).sequence() == "bbbb");
  CHECK(parse_subdomain_solver("adjointed") == K::adjointed);
  CHECK_THROWS(parse_subdomain_solver("lu"));
  CHECK(schedule_cost(SmootherSchedule("ffb"), tridiag(4)) == 3.0 * 2.0 * 10.0);
}
