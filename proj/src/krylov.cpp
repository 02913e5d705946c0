#include "schwarz/krylov.hpp"

#include <cmath>

namespace schwarz {

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::breakdown: return "breakdown";
    case StopReason::divergence: return "divergence";
  }
  return "?";
}

StoppingRule StoppingRule::a_norm(Vector reference, std::size_t max_iterations, double tol) {
  StoppingRule r;
  r.mode = Mode::a_norm_error;
  r.reference = std::move(reference);
  r.max_iterations = max_iterations;
  r.tol = tol;
  return r;
}

StoppingRule StoppingRule::residual(std::size_t max_iterations, double tol) {
  StoppingRule r;
  r.mode = Mode::residual;
  r.max_iterations = max_iterations;
  r.tol = tol;
  return r;
}

double SolveReport::mean_ratio() const {
  if (iterations == 0 || error_ratio.size() < 2) return 0.0;
  const double last = error_ratio.back();
  if (!(last > 0.0)) return 0.0;
  return std::pow(last / error_ratio.front(), 1.0 / static_cast<double>(error_ratio.size() - 1));
}

nlohmann::json SolveReport::to_json() const {
  return {{"method", method},
          {"iterations", iterations},
          {"converged", converged},
          {"reason", to_string(reason)},
          {"final_ratio", error_ratio.empty() ? 1.0 : error_ratio.back()},
          {"mean_ratio", mean_ratio()},
          {"work_per_iteration", work_per_iteration},
          {"half_step", half_step}};
}

namespace {

/// Records history entries and decides termination.
class Monitor {
 public:
  Monitor(const SparseMatrix& a, std::span<const double> f, const StoppingRule& rule, SolveReport& report)
      : a_(a), f_(f), rule_(rule), report_(report), tmp_(a.rows()) {
    if (!(rule.tol > 0.0)) throw std::invalid_argument("stopping rule: tol must be positive");
    if (rule.mode == StoppingRule::Mode::a_norm_error && rule.reference.size() != a.rows())
      throw DimensionError("stopping rule: reference solution has wrong length");
  }

  /// Returns true when the run should stop.
  bool record(std::span<const double> u) {
    a_.multiply(u, tmp_);
    double rr = 0.0;
    for (std::size_t i = 0; i < tmp_.size(); ++i) {
      const double d = f_[i] - tmp_[i];
      rr += d * d;
    }
    const double res = std::sqrt(rr);
    double measure = res;
    if (rule_.mode == StoppingRule::Mode::a_norm_error) {
      Vector e = subtract(rule_.reference, u);
      measure = energy_norm(a_, e);
    }
    report_.residual_norm.push_back(res);
    if (report_.error_ratio.empty()) {
      initial_ = measure;
      report_.error_ratio.push_back(1.0);
      if (initial_ == 0.0) {
        report_.converged = true;
        report_.reason = StopReason::tolerance;
        return true;
      }
      return false;
    }
    const double ratio = measure / initial_;
    report_.error_ratio.push_back(ratio);
    ++report_.iterations;
    if (!std::isfinite(ratio) || ratio > rule_.divergence_factor) {
      report_.reason = StopReason::divergence;
      return true;
    }
    if (ratio <= rule_.tol) {
      report_.converged = true;
      report_.reason = StopReason::tolerance;
      return true;
    }
    if (report_.iterations >= rule_.max_iterations) {
      report_.reason = StopReason::max_iterations;
      return true;
    }
    return false;
  }

  void breakdown() { report_.reason = StopReason::breakdown; }

  /// Whether u already meets the tolerance; records nothing.
  bool meets_tolerance(std::span<const double> u) {
    double measure = 0.0;
    if (rule_.mode == StoppingRule::Mode::a_norm_error) {
      measure = energy_norm(a_, subtract(rule_.reference, u));
    } else {
      a_.multiply(u, tmp_);
      double rr = 0.0;
      for (std::size_t i = 0; i < tmp_.size(); ++i) rr += (f_[i] - tmp_[i]) * (f_[i] - tmp_[i]);
      measure = std::sqrt(rr);
    }
    return measure / initial_ <= rule_.tol;
  }

 private:
  const SparseMatrix& a_;
  std::span<const double> f_;
  const StoppingRule& rule_;
  SolveReport& report_;
  Vector tmp_;
  double initial_ = 0.0;
};

void check_dims(const SparseMatrix& a, const LinearOperator& b, std::span<const double> f) {
  if (!a.square() || b.rows() != a.rows() || b.cols() != a.rows() || f.size() != a.rows())
    throw DimensionError("solver: dimension mismatch");
}

}  // namespace

SolveReport stationary_solve(const SparseMatrix& a, const LinearOperator& b, std::span<const double> f,
                             double omega, const StoppingRule& rule, StationaryForm form) {
  check_dims(a, b, f);
  if (!(omega > 0.0)) throw std::invalid_argument("stationary_solve: omega must be positive");
  const std::size_t n = a.rows();
  SolveReport report;
  report.method = "stationary";
  const double nd = static_cast<double>(n);
  report.work_per_iteration =
      b.cost() + (form == StationaryForm::native ? 0.0 : 2.0 * static_cast<double>(a.nnz()) + 3.0 * nd);

  Vector u(n, 0.0), r(n), z(n);
  Monitor mon(a, f, rule, report);
  if (!mon.record(u)) {
    for (;;) {
      a.multiply(u, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = f[i] - r[i];
      b.apply(r, z);
      axpy(omega, z, u);
      if (mon.record(u)) break;
    }
  }
  report.solution = std::move(u);
  return report;
}

SolveReport pcg_solve(const SparseMatrix& a, const LinearOperator& b, std::span<const double> f,
                      const StoppingRule& rule) {
  check_dims(a, b, f);
  const std::size_t n = a.rows();
  SolveReport report;
  report.method = "cg";
  const double nd = static_cast<double>(n);
  report.work_per_iteration = b.cost() + 2.0 * static_cast<double>(a.nnz()) + 4.0 * nd + 6.0 * nd;

  Vector u(n, 0.0), r(f.begin(), f.end()), z(n), q(n);
  Monitor mon(a, f, rule, report);
  if (!mon.record(u)) {
    b.apply(r, z);
    Vector p = z;
    double rz = dot(r, z);
    for (;;) {
      a.multiply(p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0) || !std::isfinite(pq) || !std::isfinite(rz)) {
        mon.breakdown();
        break;
      }
      const double alpha = rz / pq;
      axpy(alpha, p, u);
      axpy(-alpha, q, r);
      if (mon.record(u)) break;
      b.apply(r, z);
      const double rz_next = dot(r, z);
      if (rz_next == 0.0 || !std::isfinite(rz_next)) {
        mon.breakdown();
        break;
      }
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }
  report.solution = std::move(u);
  return report;
}

SolveReport bicgstab_solve(const SparseMatrix& a, const LinearOperator& b, std::span<const double> f,
                           const StoppingRule& rule) {
  check_dims(a, b, f);
  const std::size_t n = a.rows();
  SolveReport report;
  report.method = "bicgstab";
  const double nd = static_cast<double>(n);
  report.work_per_iteration = 2.0 * b.cost() + 4.0 * static_cast<double>(a.nnz()) + 10.0 * nd + 12.0 * nd;

  Vector u(n, 0.0), r(n), tmp(n), v(n, 0.0), p(n, 0.0), s(n), t(n);
  auto apply_ba = [&](std::span<const double> x, std::span<double> y) {
    a.multiply(x, tmp);
    b.apply(tmp, y);
  };
  Monitor mon(a, f, rule, report);
  if (!mon.record(u)) {
    b.apply(f, r);
    const Vector r_hat = r;
    const double r0_sq = dot(r, r);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (;;) {
      const double rho_next = dot(r_hat, r);
      if (!(std::abs(rho_next) >= 1e-30 * r0_sq) || !std::isfinite(rho_next)) {
        mon.breakdown();
        break;
      }
      const double beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      apply_ba(p, v);
      const double rv = dot(r_hat, v);
      if (rv == 0.0 || !std::isfinite(rv)) {
        mon.breakdown();
        break;
      }
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      // early exit after the half step
      Vector half = u;
      axpy(alpha, p, half);
      if (mon.meets_tolerance(half)) {
        u = std::move(half);
        report.half_step = true;
        mon.record(u);
        break;
      }
      apply_ba(s, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        u[i] += alpha * p[i] + omega * s[i];
        r[i] = s[i] - omega * t[i];
      }
      if (mon.record(u)) break;
      if (omega == 0.0 || !std::isfinite(omega)) {
        mon.breakdown();
        break;
      }
    }
  }
  report.solution = std::move(u);
  return report;
}

}  // namespace schwarz
