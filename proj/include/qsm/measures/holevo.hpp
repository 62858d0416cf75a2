#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "qsm/semimarkov/process.hpp"

namespace qsm {

/// States rho_k drawn with probabilities p_k.
class HolevoEnsemble {
 public:
  HolevoEnsemble(std::vector<DensityMatrix> states, std::vector<double> probabilities)
      : states_(std::move(states)), probabilities_(std::move(probabilities)) {
    if (states_.empty() || states_.size() != probabilities_.size())
      throw DomainError("HolevoEnsemble: need one probability per state");
    double total = 0.0;
    for (double p : probabilities_) {
      if (!(p >= 0.0)) throw DomainError("HolevoEnsemble: probabilities must be non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("HolevoEnsemble: probabilities must sum to 1");
    for (const auto& s : states_)
      if (s.dim() != states_.front().dim()) throw DimensionMismatch("HolevoEnsemble: states differ in dimension");
  }

  /// {|+><+|, |-><-|} with equal weights.
  static HolevoEnsemble plus_minus() { return {{DensityMatrix::plus(), DensityMatrix::minus()}, {0.5, 0.5}}; }

  const std::vector<DensityMatrix>& states() const { return states_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  Eigen::Index dim() const { return states_.front().dim(); }

 private:
  std::vector<DensityMatrix> states_;
  std::vector<double> probabilities_;
};

struct HolevoPoint {
  double t;
  double chi;
};

namespace measures {

/// chi = S(sum_k p_k rho_k) - sum_k p_k S(rho_k), in bits.
inline double holevo_chi(const HolevoEnsemble& ensemble) {
  const auto d = ensemble.dim();
  ComplexMatrix average = ComplexMatrix::Zero(d, d);
  double conditional = 0.0;
  for (std::size_t k = 0; k < ensemble.states().size(); ++k) {
    const double p = ensemble.probabilities()[k];
    average += p * ensemble.states()[k].matrix();
    conditional += p * numerics::von_neumann_entropy(ensemble.states()[k]);
  }
  return numerics::von_neumann_entropy(average) - conditional;
}

template <TimeLocalProcess Process>
std::vector<HolevoPoint> holevo_curve(const Process& proc, const HolevoEnsemble& ensemble, std::span<const double> times) {
  if (ensemble.dim() != proc.dim()) throw DimensionMismatch("holevo_curve: ensemble dimension mismatch");
  std::vector<HolevoPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto phi = proc.map_at(t).superop;
    std::vector<DensityMatrix> evolved;
    for (const auto& rho : ensemble.states())
      evolved.push_back(DensityMatrix::from_matrix(numerics::hermitian_part(phi.apply(rho.matrix()))));
    out.push_back({t, holevo_chi(HolevoEnsemble(std::move(evolved), ensemble.probabilities()))});
  }
  return out;
}

/// 1 - H2((1 + |q|)/2): the |+-> ensemble under qubit dephasing.
inline double holevo_dephasing_closed_form(double q) {
  return 1.0 - numerics::binary_entropy(0.5 * (1.0 + std::abs(q)));
}

}  // namespace measures
}  // namespace qsm
