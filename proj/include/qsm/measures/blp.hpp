#pragma once

#include <cmath>
#include <vector>

#include "qsm/numerics/quadrature.hpp"
#include "qsm/semimarkov/process.hpp"

namespace qsm {

struct BlpResult {
  /// Total increase of the trace distance over all intervals where it grows.
  double value = 0.0;
  std::vector<Interval> revivals;
  std::vector<double> times;
  std::vector<double> distance;
};

namespace measures {

/// Trace distance D(t) = (1/2) ||Phi(t)[rho1 - rho2]||_1 along a uniform grid
/// on [0, t_max], summed over its intervals of increase. `steps` = 0 picks a
/// spacing of 1e-3.
template <TimeLocalProcess Process>
BlpResult blp_measure(const Process& proc, double t_max, const DensityMatrix& rho1, const DensityMatrix& rho2,
                      std::size_t steps = 0) {
  if (!(t_max > 0.0)) throw GridError("blp_measure: t_max must be positive");
  if (rho1.dim() != proc.dim() || rho2.dim() != proc.dim()) throw DimensionMismatch("blp_measure: state dimension mismatch");
  if (steps == 0) steps = static_cast<std::size_t>(std::ceil(t_max / 1e-3));

  const ComplexMatrix delta = rho1.matrix() - rho2.matrix();
  BlpResult out;
  out.times.reserve(steps + 1);
  out.distance.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = t_max * static_cast<double>(k) / static_cast<double>(steps);
    const ComplexMatrix evolved = proc.map_at(t).superop.apply(delta);
    out.times.push_back(t);
    out.distance.push_back(0.5 * numerics::trace_norm(numerics::hermitian_part(evolved)));
  }

  bool rising = false;
  for (std::size_t k = 0; k + 1 < out.times.size(); ++k) {
    const double inc = out.distance[k + 1] - out.distance[k];
    if (inc > 0.0) {
      out.value += inc;
      if (rising) out.revivals.back().hi = out.times[k + 1];
      else out.revivals.push_back({out.times[k], out.times[k + 1]});
      rising = true;
    } else {
      rising = false;
    }
  }
  return out;
}

template <TimeLocalProcess Process>
BlpResult blp_measure(const Process& proc, double t_max, std::size_t steps = 0) {
  return blp_measure(proc, t_max, DensityMatrix::plus(), DensityMatrix::minus(), steps);
}

}  // namespace measures
}  // namespace qsm
