#pragma once

#include <cmath>
#include <vector>

#include "qsm/numerics/matrix.hpp"

namespace qsm {

/// Solution of a memory-kernel equation sampled on a uniform grid.
struct VolterraTrajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<ComplexMatrix> maps;
};

namespace numerics {

/// Solves dPhi/dt = int_0^t k(t - tau) G Phi(tau) dtau with Phi(0) = 1 on the
/// grid t_n = n dt, n dt <= t_max.
///
/// The memory integral uses the trapezoidal rule over the stored history and
/// time stepping is Heun's predictor-corrector, so the global error is
/// O(dt^2). Each step costs O(n) matrix additions.
template <class Kernel>
VolterraTrajectory solve_volterra(Kernel&& kernel, const ComplexMatrix& generator, double t_max, double dt) {
  if (!(dt > 0.0)) throw GridError("solve_volterra: dt must be positive");
  if (!(t_max >= dt)) throw GridError("solve_volterra: t_max must be at least dt");
  if (generator.rows() != generator.cols()) throw DimensionMismatch("solve_volterra: generator is not square");

  const auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  const auto dim = generator.rows();

  // The grid is uniform, so the kernel is only ever needed at lags m dt.
  std::vector<double> lag(steps + 1);
  for (std::size_t m = 0; m <= steps; ++m) {
    lag[m] = kernel(static_cast<double>(m) * dt);
    if (!std::isfinite(lag[m])) throw NumericalError("solve_volterra: kernel is not finite on the grid");
  }

  VolterraTrajectory out;
  out.dt = dt;
  out.times.reserve(steps + 1);
  out.maps.reserve(steps + 1);
  out.times.push_back(0.0);
  out.maps.push_back(ComplexMatrix::Identity(dim, dim));

  // Derivative at t_0 vanishes: the memory integral is over an empty range.
  ComplexMatrix slope = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix history(dim, dim);
  for (std::size_t n = 0; n < steps; ++n) {
    // Trapezoid weights over t_0..t_n for the integral ending at t_{n+1};
    // the t_{n+1} endpoint is added separately for predictor and corrector.
    history.setZero();
    for (std::size_t j = 0; j <= n; ++j) {
      const double w = (j == 0 ? 0.5 : 1.0) * lag[n + 1 - j];
      history.noalias() += w * out.maps[j];
    }
    const ComplexMatrix& current = out.maps[n];
    const ComplexMatrix predicted = current + dt * slope;
    const ComplexMatrix slope_pred = dt * generator * (history + 0.5 * lag[0] * predicted);
    ComplexMatrix next = current + 0.5 * dt * (slope + slope_pred);
    slope = dt * generator * (history + 0.5 * lag[0] * next);

    out.times.push_back(static_cast<double>(n + 1) * dt);
    out.maps.push_back(std::move(next));
  }
  return out;
}

}  // namespace numerics
}  // namespace qsm
