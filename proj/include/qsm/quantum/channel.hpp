#pragma once

#include <cmath>
#include <vector>

#include "qsm/quantum/state.hpp"

namespace qsm {

/// Operator-sum representation {C_j} with sum_j C_j^dagger C_j = 1.
class KrausSet {
 public:
  static constexpr double kTolerance = 1e-10;

  static KrausSet from_operators(std::vector<ComplexMatrix> ops) {
    if (ops.empty()) throw DomainError("KrausSet: needs at least one operator");
    const auto d = ops.front().rows();
    ComplexMatrix completeness = ComplexMatrix::Zero(d, d);
    for (const auto& c : ops) {
      if (c.rows() != d || c.cols() != d) throw DimensionMismatch("KrausSet: operators must all be d x d");
      completeness += c.adjoint() * c;
    }
    if (numerics::max_abs_entry(completeness - numerics::identity(d)) > kTolerance)
      throw DomainError("KrausSet: operators are not trace preserving");
    return KrausSet(std::move(ops));
  }

  static KrausSet identity(Eigen::Index d) { return KrausSet({numerics::identity(d)}); }

  Eigen::Index dim() const { return ops_.front().rows(); }
  const std::vector<ComplexMatrix>& operators() const { return ops_; }

 private:
  explicit KrausSet(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {}
  std::vector<ComplexMatrix> ops_;
};

/// chi = (Phi (x) 1)|Psi><Psi| with |Psi> = sum_j |j, j> unnormalised. The
/// first tensor factor carries the map output, so entry
/// chi[a d + i, b d + j] = <a| Phi(|i><j|) |b>.
class ChoiMatrix {
 public:
  ChoiMatrix(Eigen::Index d, ComplexMatrix m) : dim_(d), matrix_(std::move(m)) {
    if (d < 1 || matrix_.rows() != d * d || matrix_.cols() != d * d)
      throw DimensionMismatch("ChoiMatrix: matrix must be d^2 x d^2");
  }

  Eigen::Index dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }

  /// Tr over the output factor; equals the identity for trace-preserving maps.
  ComplexMatrix partial_trace_output() const {
    ComplexMatrix out = ComplexMatrix::Zero(dim_, dim_);
    for (Eigen::Index a = 0; a < dim_; ++a) out += matrix_.block(a * dim_, a * dim_, dim_, dim_);
    return out;
  }

 private:
  Eigen::Index dim_;
  ComplexMatrix matrix_;
};

/// Matrix acting on column-major vectorised operators: vec(Phi(rho)) = S vec(rho).
class SuperOperator {
 public:
  SuperOperator(Eigen::Index d, ComplexMatrix m) : dim_(d), matrix_(std::move(m)) {
    if (d < 1 || matrix_.rows() != d * d || matrix_.cols() != d * d)
      throw DimensionMismatch("SuperOperator: matrix must be d^2 x d^2");
  }

  static SuperOperator identity(Eigen::Index d) { return {d, numerics::identity(d * d)}; }

  Eigen::Index dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return matrix_; }

  ComplexMatrix apply(const ComplexMatrix& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) throw DimensionMismatch("SuperOperator::apply: operator dimension mismatch");
    const ComplexVector v = matrix_ * Eigen::Map<const ComplexVector>(rho.data(), rho.size());
    return Eigen::Map<const ComplexMatrix>(v.data(), dim_, dim_);
  }

  DensityMatrix apply(const DensityMatrix& rho) const { return DensityMatrix::from_matrix(apply(rho.matrix())); }

  friend SuperOperator operator*(const SuperOperator& l, const SuperOperator& r) {
    if (l.dim_ != r.dim_) throw DimensionMismatch("SuperOperator: composing maps of different dimension");
    return {l.dim_, l.matrix_ * r.matrix_};
  }

 private:
  Eigen::Index dim_;
  ComplexMatrix matrix_;
};

/// A channel snapshot Phi(t), carried in both forms.
struct QuantumMap {
  double t = 0.0;
  KrausSet kraus;
  SuperOperator superop;
};

struct CptpReport {
  bool cptp = false;
  double min_eigenvalue = 0.0;
  /// max entry of |Tr_out chi - 1|
  double trace_defect = 0.0;
  double hermiticity_defect = 0.0;
};

namespace quantum {

inline DensityMatrix apply_kraus(const KrausSet& k, const DensityMatrix& rho) {
  if (k.dim() != rho.dim()) throw DimensionMismatch("apply_kraus: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& c : k.operators()) out += c * rho.matrix() * c.adjoint();
  return DensityMatrix::from_matrix(numerics::hermitian_part(out));
}

inline SuperOperator superoperator_of(const KrausSet& k) {
  const auto d = k.dim();
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& c : k.operators()) s += numerics::kron(c.conjugate(), c);
  return {d, std::move(s)};
}

inline ChoiMatrix choi_of_map(const KrausSet& k) {
  const auto d = k.dim();
  ComplexMatrix chi = ComplexMatrix::Zero(d * d, d * d);
  for (const auto& c : k.operators()) {
    // |C>> with entries C[a, i] at a d + i, i.e. the row-major flattening.
    ComplexVector v(d * d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index i = 0; i < d; ++i) v(a * d + i) = c(a, i);
    chi += v * v.adjoint();
  }
  return {d, std::move(chi)};
}

inline ChoiMatrix choi_of(const SuperOperator& s) {
  const auto d = s.dim();
  ComplexMatrix chi(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) chi(a * d + i, b * d + j) = s.matrix()(a + b * d, i + j * d);
  return {d, std::move(chi)};
}

inline SuperOperator superoperator_of(const ChoiMatrix& c) {
  const auto d = c.dim();
  ComplexMatrix s(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) s(a + b * d, i + j * d) = c.matrix()(a * d + i, b * d + j);
  return {d, std::move(s)};
}

/// Kraus operators from the spectral decomposition of a CPTP Choi matrix.
/// Each operator is phased so its largest-magnitude entry is real positive.
inline KrausSet kraus_of_choi(const ChoiMatrix& c) {
  const auto d = c.dim();
  const auto spec = numerics::hermitian_eig(numerics::hermitian_part(c.matrix()));
  const double cutoff = 1e-14 * std::max(1.0, spec.values.front());
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < spec.values.size(); ++k) {
    const double lambda = spec.values[k];
    if (lambda < -1e-10) throw DomainError("kraus_of_choi: Choi matrix is not positive semidefinite");
    if (lambda <= cutoff) continue;
    ComplexVector v = spec.vectors.col(static_cast<Eigen::Index>(k));
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    v *= std::conj(v(pivot)) / std::abs(v(pivot));
    ComplexMatrix op(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index i = 0; i < d; ++i) op(a, i) = std::sqrt(lambda) * v(a * d + i);
    ops.push_back(std::move(op));
  }
  return KrausSet::from_operators(std::move(ops));
}

/// CPTP test on the Hermitian part of the Choi matrix: min eigenvalue >= -tol
/// and Tr_out chi = 1 within tol.
inline CptpReport is_cptp(const ChoiMatrix& c, double tol = 1e-8) {
  CptpReport report;
  report.hermiticity_defect = numerics::hermiticity_defect(c.matrix());
  const auto spec = numerics::hermitian_eig(numerics::hermitian_part(c.matrix()));
  report.min_eigenvalue = spec.values.back();
  report.trace_defect = numerics::max_abs_entry(c.partial_trace_output() - numerics::identity(c.dim()));
  report.cptp = report.min_eigenvalue >= -tol && report.trace_defect <= tol && report.hermiticity_defect <= tol;
  return report;
}

inline constexpr double kMaxConditionNumber = 1e12;

/// V(t2, t1) = Phi(t2) Phi(t1)^-1. Throws SingularMap when Phi(t1) has
/// condition number above 1e12.
inline SuperOperator intermediate_map(const SuperOperator& phi_t2, const SuperOperator& phi_t1) {
  if (phi_t1.dim() != phi_t2.dim()) throw DimensionMismatch("intermediate_map: dimension mismatch");
  const double cond = numerics::condition_number(phi_t1.matrix());
  if (!(cond <= kMaxConditionNumber)) throw SingularMap("intermediate_map: Phi(t1) is not invertible");
  const ComplexMatrix inv = phi_t1.matrix().fullPivLu().inverse();
  return {phi_t1.dim(), phi_t2.matrix() * inv};
}

}  // namespace quantum
}  // namespace qsm
