#pragma once

#include "qsm/numerics/spectral.hpp"

namespace qsm {

/// Hermitian, unit-trace, positive semidefinite d x d matrix. Instances are
/// only created through the validating factories.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  static DensityMatrix from_matrix(ComplexMatrix m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw DimensionMismatch("DensityMatrix: matrix must be square and non-empty");
    if (numerics::hermiticity_defect(m) > kTolerance) throw InvalidState("DensityMatrix: matrix is not Hermitian");
    if (std::abs(m.trace() - Complex(1.0, 0.0)) > kTolerance) throw InvalidState("DensityMatrix: trace differs from 1");
    const auto spec = numerics::hermitian_eig(numerics::hermitian_part(m));
    if (spec.values.back() < -kTolerance) throw InvalidState("DensityMatrix: matrix is not positive semidefinite");
    return DensityMatrix(std::move(m));
  }

  /// |psi><psi| / <psi|psi>
  static DensityMatrix pure(const ComplexVector& psi) {
    const double norm2 = psi.squaredNorm();
    if (!(norm2 > 0.0)) throw InvalidState("DensityMatrix::pure: zero vector");
    return DensityMatrix(psi * psi.adjoint() / norm2);
  }

  static DensityMatrix basis(Eigen::Index d, Eigen::Index k) {
    if (k < 0 || k >= d) throw DomainError("DensityMatrix::basis: index out of range");
    ComplexVector v = ComplexVector::Zero(d);
    v(k) = 1.0;
    return pure(v);
  }

  static DensityMatrix maximally_mixed(Eigen::Index d) {
    if (d < 1) throw DomainError("DensityMatrix::maximally_mixed: dimension must be positive");
    return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  }

  /// |+> and |-> for a qubit.
  static DensityMatrix plus() { return pure((ComplexVector(2) << 1.0, 1.0).finished()); }
  static DensityMatrix minus() { return pure((ComplexVector(2) << 1.0, -1.0).finished()); }

  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

namespace numerics {
inline double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }
}  // namespace numerics

}  // namespace qsm
