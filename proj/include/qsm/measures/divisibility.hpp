#pragma once

#include <limits>
#include <span>
#include <vector>

#include "qsm/numerics/quadrature.hpp"
#include "qsm/semimarkov/dephasing.hpp"
#include "qsm/semimarkov/process.hpp"

namespace qsm {

struct DivisibilityStep {
  double t1 = 0.0;
  double t2 = 0.0;
  /// Smallest eigenvalue of the intermediate map's Choi matrix (NaN if singular).
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  double trace_defect = std::numeric_limits<double>::quiet_NaN();
  bool cptp = false;
  /// Phi(t1) could not be inverted.
  bool singular = false;
};

struct DivisibilityReport {
  std::vector<DivisibilityStep> steps;
  /// Maximal runs of consecutive non-CPTP steps.
  std::vector<Interval> violations;
  std::size_t singular_steps = 0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();

  bool divisible() const { return violations.empty(); }
};

struct BoundaryEstimate {
  double p_star = 0.0;
  /// Largest p seen divisible and smallest p seen indivisible.
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
};

namespace measures {

/// Checks V(t2, t1) = Phi(t2) Phi(t1)^-1 for complete positivity on every
/// consecutive pair of the grid. Non-invertible Phi(t1) is flagged on the
/// step, not thrown.
template <TimeLocalProcess Process>
DivisibilityReport cp_divisibility_scan(const Process& proc, std::span<const double> grid, double tol = 1e-8) {
  if (grid.size() < 2) throw GridError("cp_divisibility_scan: grid needs at least two points");
  DivisibilityReport report;
  bool in_violation = false;
  auto previous = proc.map_at(grid[0]).superop;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (!(grid[k + 1] > grid[k])) throw GridError("cp_divisibility_scan: grid must be strictly increasing");
    auto current = proc.map_at(grid[k + 1]).superop;
    DivisibilityStep step{grid[k], grid[k + 1]};
    try {
      const auto v = quantum::intermediate_map(current, previous);
      const auto check = quantum::is_cptp(quantum::choi_of(v), tol);
      step.min_eigenvalue = check.min_eigenvalue;
      step.trace_defect = check.trace_defect;
      step.cptp = check.cptp;
      report.min_eigenvalue = std::min(report.min_eigenvalue, check.min_eigenvalue);
    } catch (const SingularMap&) {
      step.singular = true;
      ++report.singular_steps;
    }
    const bool violated = !step.singular && !step.cptp;
    if (violated) {
      if (in_violation) report.violations.back().hi = step.t2;
      else report.violations.push_back({step.t1, step.t2});
    }
    in_violation = violated;
    report.steps.push_back(step);
    previous = std::move(current);
  }
  return report;
}

/// Bisection over p at fixed s for the onset of CP-indivisibility of the
/// dephasing family, as detected by cp_divisibility_scan on `grid`.
/// The scan can only see violations where Phi(t1) is still invertible, so
/// the estimate sits slightly above the analytic boundary.
inline BoundaryEstimate divisibility_boundary(double s, std::span<const double> grid, double p_lo, double p_hi,
                                              double tol = 1e-4) {
  auto indivisible = [&](double p) { return !cp_divisibility_scan(DephasingSemiMarkov(s, p), grid).divisible(); };
  if (!(p_lo < p_hi)) throw DomainError("divisibility_boundary: requires p_lo < p_hi");
  if (indivisible(p_lo)) throw DomainError("divisibility_boundary: lower end is already indivisible");
  if (!indivisible(p_hi)) throw DomainError("divisibility_boundary: upper end is divisible on this grid");
  BoundaryEstimate est;
  double lo = p_lo, hi = p_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (indivisible(mid) ? hi : lo) = mid;
    ++est.iterations;
  }
  est.lower = lo;
  est.upper = hi;
  est.p_star = 0.5 * (lo + hi);
  return est;
}

}  // namespace measures
}  // namespace qsm
