#pragma once

#include <numbers>

#include "qsm/quantum/channel.hpp"

namespace qsm {

enum class JumpStructure {
  /// rho -> Z_d rho Z_d^dagger, the clock (generalised Pauli Z) conjugation.
  ClockDephasing,
  /// rho -> |0><0| Tr(rho), the idempotent CPTP projector.
  Projector,
};

enum class RateNormalization {
  /// L = gamma (J - 1)
  Unit,
  /// L = (gamma / d) (J - 1), the qudit Pauli-channel convention.
  PerDimension,
};

/// Time-local generator rho -> c gamma (J[rho] - rho) at one instant, where
/// c is 1 or 1/d depending on the normalisation.
struct GeneratorSnapshot {
  Eigen::Index dim = 2;
  double rate = 0.0;
  JumpStructure structure = JumpStructure::ClockDephasing;
  RateNormalization normalization = RateNormalization::Unit;
};

namespace quantum {

/// Clock matrix diag(1, w, ..., w^(d-1)), w = exp(2 pi i / d).
inline ComplexMatrix weyl_z(Eigen::Index d) {
  if (d < 2) throw DomainError("weyl_z: dimension must be at least 2");
  ComplexMatrix z = ComplexMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k)
    z(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(d));
  return z;
}

inline SuperOperator conjugation_channel(const ComplexMatrix& u) {
  return {u.rows(), numerics::kron(u.conjugate(), u)};
}

inline SuperOperator projector_channel(Eigen::Index d) {
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  // Output |0><0| sits at vec index 0; the trace reads the diagonal i + i d.
  for (Eigen::Index i = 0; i < d; ++i) s(0, i + i * d) = 1.0;
  return {d, std::move(s)};
}

/// Qubit dephasing rho -> ((1+q)/2) rho + ((1-q)/2) Z rho Z. Any real q is
/// accepted; the map is CPTP only for |q| <= 1.
inline SuperOperator qubit_dephasing_channel(double q) {
  ComplexMatrix s = ComplexMatrix::Identity(4, 4);
  s(1, 1) = q;
  s(2, 2) = q;
  return {2, std::move(s)};
}

inline SuperOperator jump_channel(JumpStructure structure, Eigen::Index d) {
  switch (structure) {
    case JumpStructure::ClockDephasing: return conjugation_channel(weyl_z(d));
    case JumpStructure::Projector: return projector_channel(d);
  }
  throw DomainError("jump_channel: unknown jump structure");
}

inline SuperOperator superoperator_of(const GeneratorSnapshot& g) {
  if (g.dim < 2) throw DomainError("GeneratorSnapshot: dimension must be at least 2");
  const double prefactor =
      g.normalization == RateNormalization::PerDimension ? g.rate / static_cast<double>(g.dim) : g.rate;
  const auto jump = jump_channel(g.structure, g.dim);
  return {g.dim, prefactor * (jump.matrix() - numerics::identity(g.dim * g.dim))};
}

/// (L (x) 1)|Psi><Psi| for the generator snapshot.
inline ChoiMatrix choi_of_generator(const GeneratorSnapshot& g) { return choi_of(superoperator_of(g)); }

}  // namespace quantum
}  // namespace qsm
