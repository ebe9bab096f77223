#include "qsync/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace qsync {

CMatrix expm(const CMatrix& m) { return m.exp(); }

Real min_hermitian_eigenvalue(const CMatrix& m) {
  const CMatrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace qsync
