#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qsm/errors.hpp"

namespace qsm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace numerics {

inline double max_abs_entry(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max_ij |M_ij - conj(M_ji)|
inline double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("hermiticity_defect: matrix is not square");
  return max_abs_entry(m - m.adjoint());
}

inline bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  return hermiticity_defect(m) <= rel_tol * max_abs_entry(m);
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  return (m + m.adjoint()) / 2.0;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline ComplexMatrix identity(Eigen::Index d) { return ComplexMatrix::Identity(d, d); }

}  // namespace numerics
}  // namespace qsm
