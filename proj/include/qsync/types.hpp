#pragma once

#include <complex>

#include <Eigen/Dense>

namespace qsync {

using Index = Eigen::Index;
using Real = double;
using Complex = std::complex<Real>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrix = Matrix<Complex>;
using CVector = Vector<Complex>;
using RMatrix = Matrix<Real>;
using RVector = Vector<Real>;

inline constexpr Complex kI{0.0, 1.0};

}  // namespace qsync
