#pragma once

#include <vector>

#include "qsm/quantum/generator.hpp"
#include "qsm/semimarkov/wtd.hpp"

namespace qsm {

/// Semi-Markov process with jumps given by the projector P[rho] = |0><0| Tr rho:
///   Phi(t) = g(t) 1 + (1 - g(t)) P,   L(t) = gamma(t) (P - 1),
/// where g is the survival of the waiting-time distribution and
/// gamma = f / g its hazard.
class ProjectorSemiMarkov {
 public:
  explicit ProjectorSemiMarkov(WaitingTimeDist w, Eigen::Index dim = 2) : wtd_(w), dim_(dim) {
    if (dim < 2) throw DomainError("ProjectorSemiMarkov: dimension must be at least 2");
  }

  const WaitingTimeDist& waiting_time() const { return wtd_; }
  Eigen::Index dim() const { return dim_; }

  double survival(double t) const { return semimarkov::survival(wtd_, t); }
  double rate(double t) const { return semimarkov::hazard(wtd_, t); }

  std::vector<double> singular_times(double, double) const { return {}; }

  SuperOperator jump_generator() const {
    return {dim_, quantum::projector_channel(dim_).matrix() - numerics::identity(dim_ * dim_)};
  }

  JumpStructure jump_structure() const { return JumpStructure::Projector; }

  SuperOperator superoperator_at(double t) const {
    const double g = survival(t);
    return {dim_, g * numerics::identity(dim_ * dim_) + (1.0 - g) * quantum::projector_channel(dim_).matrix()};
  }

  QuantumMap map_at(double t) const {
    auto s = superoperator_at(t);
    auto kraus = quantum::kraus_of_choi(quantum::choi_of(s));
    return {t, std::move(kraus), std::move(s)};
  }

 private:
  WaitingTimeDist wtd_;
  Eigen::Index dim_;
};

namespace semimarkov {

/// Damped-hopping family: tanh-sech waiting times, rate lambda tanh(lambda t).
inline ProjectorSemiMarkov nonunital(double lambda) {
  return ProjectorSemiMarkov(WaitingTimeDist::tanh_sech(lambda));
}

inline double gamma_nonunital(const ProjectorSemiMarkov& proc, double t) { return proc.rate(t); }
inline QuantumMap map_at(const ProjectorSemiMarkov& proc, double t) { return proc.map_at(t); }

}  // namespace semimarkov
}  // namespace qsm
