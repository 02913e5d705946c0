#include "schwarz/smooth.hpp"

#include <algorithm>

namespace schwarz {

namespace {

inline void relax_row(const SparseMatrix& a, std::size_t i, std::span<double> x, std::span<const double> b) {
  auto cols = a.row_cols(i);
  auto vals = a.row_values(i);
  double diag = 0.0;
  double sum = b[i];
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] == i) diag = vals[k];
    else sum -= vals[k] * x[cols[k]];
  }
  if (diag == 0.0) throw ZeroDiagonalError("gs_sweep: zero diagonal in row " + std::to_string(i));
  x[i] = sum / diag;
}

}  // namespace

void gs_sweep(const SparseMatrix& a, std::span<double> x, std::span<const double> b, SweepDirection direction) {
  const std::size_t n = a.rows();
  if (!a.square() || x.size() != n || b.size() != n) throw DimensionError("gs_sweep: dimension mismatch");
  if (direction == SweepDirection::forward) {
    for (std::size_t i = 0; i < n; ++i) relax_row(a, i, x, b);
  } else {
    for (std::size_t i = n; i-- > 0;) relax_row(a, i, x, b);
  }
}

SmootherSchedule::SmootherSchedule(std::string_view seq) {
  if (seq == "0") return;
  for (char c : seq)
    if (c != 'f' && c != 'b') throw std::invalid_argument("smoother schedule: bad character in '" + std::string(seq) + "'");
  seq_ = seq;
}

SmootherSchedule SmootherSchedule::adjoint() const {
  SmootherSchedule s;
  s.seq_.assign(seq_.rbegin(), seq_.rend());
  for (char& c : s.seq_) c = c == 'f' ? 'b' : 'f';
  return s;
}

SmootherSchedule adjoint_schedule(const SmootherSchedule& s) { return s.adjoint(); }

void apply_schedule(const SmootherSchedule& s, const SparseMatrix& a, std::span<double> x, std::span<const double> b) {
  for (char c : s.sequence()) gs_sweep(a, x, b, c == 'f' ? SweepDirection::forward : SweepDirection::backward);
}

Vector smoothed(const SmootherSchedule& s, const SparseMatrix& a, Vector x, std::span<const double> b) {
  apply_schedule(s, a, std::span<double>(x), b);
  return x;
}

double schedule_cost(const SmootherSchedule& s, const SparseMatrix& a) {
  return 2.0 * static_cast<double>(a.nnz()) * static_cast<double>(s.size());
}

SubdomainSolverKind parse_subdomain_solver(std::string_view name) {
  if (name == "exact") return SubdomainSolverKind::exact;
  if (name == "symmetric") return SubdomainSolverKind::symmetric;
  if (name == "nonsymmetric") return SubdomainSolverKind::nonsymmetric;
  if (name == "adjointed") return SubdomainSolverKind::adjointed;
  throw std::invalid_argument("unknown subdomain solver '" + std::string(name) + "'");
}

std::string to_string(SubdomainSolverKind kind) {
  switch (kind) {
    case SubdomainSolverKind::exact: return "exact";
    case SubdomainSolverKind::symmetric: return "symmetric";
    case SubdomainSolverKind::nonsymmetric: return "nonsymmetric";
    case SubdomainSolverKind::adjointed: return "adjointed";
  }
  return "?";
}

SmootherSchedule subdomain_schedule(SubdomainSolverKind kind, bool reverse_pass) {
  switch (kind) {
    case SubdomainSolverKind::exact: return {};
    case SubdomainSolverKind::symmetric: return SmootherSchedule("fbfb");
    case SubdomainSolverKind::nonsymmetric: return SmootherSchedule("ffff");
    case SubdomainSolverKind::adjointed: return SmootherSchedule(reverse_pass ? "bbbb" : "ffff");
  }
  return {};
}

}  // namespace schwarz
