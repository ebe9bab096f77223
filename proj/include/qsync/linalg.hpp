#pragma once

#include <vector>

#include "qsync/types.hpp"

namespace qsync {

template <typename Derived>
Real max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <typename A, typename B>
auto commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return (a * b - b * a).eval();
}

/// ‖A − A†‖_max
template <typename Derived>
Real hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  return max_abs(m - m.adjoint());
}

template <typename Derived>
Matrix<typename Derived::Scalar> kron(const Eigen::MatrixBase<Derived>& a,
                                      const Eigen::MatrixBase<Derived>& b) {
  Matrix<typename Derived::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Submatrix on a (sorted) set of basis indices.
template <typename Derived>
Matrix<typename Derived::Scalar> restrict_to(const Eigen::MatrixBase<Derived>& m,
                                             const std::vector<Index>& idx) {
  Matrix<typename Derived::Scalar> out(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = m(idx[i], idx[j]);
  return out;
}

/// Matrix exponential by Padé-13 scaling and squaring.
CMatrix expm(const CMatrix& m);

/// Smallest eigenvalue of the Hermitian part of m.
Real min_hermitian_eigenvalue(const CMatrix& m);

}  // namespace qsync
