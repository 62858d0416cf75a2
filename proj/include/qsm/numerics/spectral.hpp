#pragma once

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qsm/numerics/matrix.hpp"

namespace qsm {

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order and `vectors.col(k)` belongs to `values[k]`.
struct Spectrum {
  std::vector<double> values;
  ComplexMatrix vectors;
};

namespace numerics {

/// Hermitian eigensolver. The input must be Hermitian to within
/// 1e-12 relative to its largest entry.
inline Spectrum hermitian_eig(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("hermitian_eig: matrix is not square");
  if (!is_hermitian(m)) throw NonHermitianInput("hermitian_eig: input is not Hermitian");
  const auto n = m.rows();
  if (n == 0) return {};

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw NoConvergence("hermitian_eig: eigensolver did not converge");

  // Eigen returns ascending order.
  Spectrum out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[static_cast<std::size_t>(k)] = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

inline std::vector<double> singular_values(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

/// Sum of singular values. Hermitian inputs go through the eigensolver.
inline double trace_norm(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("trace_norm: matrix is not square");
  if (m.size() == 0) return 0.0;
  if (is_hermitian(m)) {
    const auto spec = hermitian_eig(m);
    return std::accumulate(spec.values.begin(), spec.values.end(), 0.0,
                           [](double acc, double v) { return acc + std::abs(v); });
  }
  const auto sv = singular_values(m);
  return std::accumulate(sv.begin(), sv.end(), 0.0);
}

/// Ratio of largest to smallest singular value (infinity when singular).
inline double condition_number(const ComplexMatrix& m) {
  const auto sv = singular_values(m);
  if (sv.empty()) return 1.0;
  const double smallest = sv.back();
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return sv.front() / smallest;
}

/// H2(x) in bits.
inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy: argument outside [0, 1]");
  auto term = [](double v) { return v > 0.0 ? -v * std::log2(v) : 0.0; };
  return term(x) + term(1.0 - x);
}

/// Shannon entropy in bits of a spectrum; entries <= 0 contribute nothing.
inline double entropy_of_spectrum(const std::vector<double>& eigenvalues) {
  double s = 0.0;
  for (double v : eigenvalues)
    if (v > 0.0) s -= v * std::log2(v);
  return s;
}

/// Von Neumann entropy in bits. Rejects matrices whose trace is off by more
/// than 1e-8 or whose smallest eigenvalue is below -1e-10.
inline double von_neumann_entropy(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols()) throw DimensionMismatch("von_neumann_entropy: matrix is not square");
  if (!is_hermitian(rho, 1e-10)) throw InvalidState("von_neumann_entropy: state is not Hermitian");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-8) throw InvalidState("von_neumann_entropy: trace differs from 1");
  const auto spec = hermitian_eig(hermitian_part(rho));
  if (!spec.values.empty() && spec.values.back() < -1e-10)
    throw InvalidState("von_neumann_entropy: state has a negative eigenvalue");
  return entropy_of_spectrum(spec.values);
}

}  // namespace numerics
}  // namespace qsm
