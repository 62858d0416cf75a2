#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "qsm/semimarkov/process.hpp"

namespace qsm::semimarkov {

struct EvolveOptions {
  /// Step size; 0 selects min(1e-3, span / 1000).
  double dt = 0.0;
};

/// Integrates d rho/dt = gamma(t) G[rho] from t = 0 with classical RK4 and
/// returns the state at each requested time. A zero of the coherence factor
/// inside the span makes the rate diverge; that is reported as
/// SingularityOnGrid and the caller has to split the interval.
template <TimeLocalProcess Process>
std::vector<DensityMatrix> evolve_timelocal(const Process& proc, const DensityMatrix& rho0,
                                            std::span<const double> times, EvolveOptions opts = {}) {
  if (rho0.dim() != proc.dim()) throw DimensionMismatch("evolve_timelocal: state dimension mismatch");
  if (times.empty()) return {};
  if (times.front() < 0.0) throw GridError("evolve_timelocal: times must start at or after 0");
  if (!std::is_sorted(times.begin(), times.end())) throw GridError("evolve_timelocal: times must be increasing");

  const double span = times.back();
  if (!proc.singular_times(0.0, span).empty())
    throw SingularityOnGrid("evolve_timelocal: the rate diverges inside the integration span");
  const double dt = opts.dt > 0.0 ? opts.dt : std::min(1e-3, span > 0.0 ? span / 1000.0 : 1e-3);

  const ComplexMatrix gen = proc.jump_generator().matrix();
  const auto d = proc.dim();
  ComplexVector v = Eigen::Map<const ComplexVector>(rho0.matrix().data(), d * d);
  auto rhs = [&](double t, const ComplexVector& x) -> ComplexVector { return proc.rate(t) * (gen * x); };

  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  double t = 0.0;
  for (double target : times) {
    const double gap = target - t;
    if (gap > 0.0) {
      const auto steps = static_cast<long>(std::ceil(gap / dt - 1e-9));
      const double h = gap / static_cast<double>(steps);
      for (long n = 0; n < steps; ++n) {
        const double t0 = t + static_cast<double>(n) * h;
        const ComplexVector k1 = rhs(t0, v);
        const ComplexVector k2 = rhs(t0 + 0.5 * h, v + 0.5 * h * k1);
        const ComplexVector k3 = rhs(t0 + 0.5 * h, v + 0.5 * h * k2);
        const ComplexVector k4 = rhs(t0 + h, v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      t = target;
    }
    ComplexMatrix rho = Eigen::Map<const ComplexMatrix>(v.data(), d, d);
    out.push_back(DensityMatrix::from_matrix(numerics::hermitian_part(rho)));
  }
  return out;
}

}  // namespace qsm::semimarkov
