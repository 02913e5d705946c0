#pragma once

#include <span>
#include <string>
#include <string_view>

#include "schwarz/linalg.hpp"

namespace schwarz {

enum class SweepDirection { forward, backward };

class ZeroDiagonalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One in-place lexicographic Gauss-Seidel sweep on A x = b, ascending
/// (forward) or descending (backward) unknown order.
void gs_sweep(const SparseMatrix& a, std::span<double> x, std::span<const double> b, SweepDirection direction);

/// Sequence of Gauss-Seidel sweeps, e.g. "ffb".  The empty schedule (written
/// "0" or "") is the zero smoother.
class SmootherSchedule {
 public:
  SmootherSchedule() = default;
  /// Throws std::invalid_argument on characters other than 'f' and 'b'.
  explicit SmootherSchedule(std::string_view seq);

  static SmootherSchedule parse(std::string_view text) { return SmootherSchedule(text); }

  const std::string& sequence() const { return seq_; }
  bool empty() const { return seq_.empty(); }
  std::size_t size() const { return seq_.size(); }
  /// "0" for the empty schedule, the sequence otherwise.
  std::string label() const { return seq_.empty() ? "0" : seq_; }

  /// Reversed sequence with f and b swapped.
  SmootherSchedule adjoint() const;
  bool self_adjoint() const { return adjoint() == *this; }

  friend SmootherSchedule operator+(const SmootherSchedule& a, const SmootherSchedule& b) {
    SmootherSchedule s;
    s.seq_ = a.seq_ + b.seq_;
    return s;
  }
  friend bool operator==(const SmootherSchedule&, const SmootherSchedule&) = default;

 private:
  std::string seq_;
};

SmootherSchedule adjoint_schedule(const SmootherSchedule& s);

/// Applies the sweeps of `s` left to right, in place.
void apply_schedule(const SmootherSchedule& s, const SparseMatrix& a, std::span<double> x, std::span<const double> b);
/// Copying variant: returns the smoothed iterate.
[[nodiscard]] Vector smoothed(const SmootherSchedule& s, const SparseMatrix& a, Vector x, std::span<const double> b);

/// Flops of one application of `s` on `a`.
double schedule_cost(const SmootherSchedule& s, const SparseMatrix& a);

/// Local solver used on each subdomain.
enum class SubdomainSolverKind { exact, symmetric, nonsymmetric, adjointed };

SubdomainSolverKind parse_subdomain_solver(std::string_view name);
std::string to_string(SubdomainSolverKind kind);

/// Schedule run on a forward (or reverse) subdomain pass; empty for exact.
SmootherSchedule subdomain_schedule(SubdomainSolverKind kind, bool reverse_pass);

}  // namespace schwarz
