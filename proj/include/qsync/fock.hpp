#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qsync/errors.hpp"
#include "qsync/types.hpp"

namespace qsync {

enum class SubsystemKind { oscillator, tls };

struct Subsystem {
  SubsystemKind kind;
  Index dim;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

/// Oscillator truncated to |0>..|n_max>, i.e. dim = n_max + 1.
Subsystem oscillator(Index dim);
Subsystem tls();

/// Ordered tensor-product structure of a composite space. The first
/// subsystem is the most significant index of the flattened basis.
class SpaceLayout {
 public:
  SpaceLayout() = default;
  explicit SpaceLayout(std::vector<Subsystem> subsystems);

  /// [osc(n_max+1)] x n_oscillators followed by [tls] x n_tls.
  static SpaceLayout oscillators_and_tls(Index n_oscillators, Index n_max, Index n_tls);

  Index dimension() const { return dimension_; }
  std::size_t size() const { return subsystems_.size(); }
  const Subsystem& operator[](std::size_t slot) const { return subsystems_.at(slot); }
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }

  Index index_of(std::span<const Index> levels) const;
  std::vector<Index> levels_of(Index index) const;

  friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

 private:
  std::vector<Subsystem> subsystems_;
  Index dimension_ = 1;
};

/// Dense operator on a composite space.
class QOperator {
 public:
  QOperator(SpaceLayout layout, CMatrix matrix);

  const SpaceLayout& layout() const { return layout_; }
  const CMatrix& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

  QOperator adjoint() const { return {layout_, matrix_.adjoint()}; }
  bool is_hermitian(Real tol = 1e-12) const;

  QOperator& operator+=(const QOperator& rhs);
  QOperator& operator-=(const QOperator& rhs);
  QOperator& operator*=(Complex c);

  friend QOperator operator+(QOperator lhs, const QOperator& rhs) { return lhs += rhs; }
  friend QOperator operator-(QOperator lhs, const QOperator& rhs) { return lhs -= rhs; }
  friend QOperator operator*(Complex c, QOperator op) { return op *= c; }
  friend QOperator operator*(const QOperator& lhs, const QOperator& rhs);

 private:
  SpaceLayout layout_;
  CMatrix matrix_;
};

// Raw matrix builders, templated on the scalar for reuse outside QOperator.

template <typename Scalar = Complex>
Matrix<Scalar> annihilation_matrix(Index dim) {
  if (dim < 2) throw InvalidDimension("oscillator dimension must be >= 2, got " + std::to_string(dim));
  Matrix<Scalar> a = Matrix<Scalar>::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) a(n - 1, n) = Scalar(std::sqrt(static_cast<double>(n)));
  return a;
}

template <typename Scalar = Complex>
Matrix<Scalar> number_matrix(Index dim) {
  if (dim < 2) throw InvalidDimension("oscillator dimension must be >= 2, got " + std::to_string(dim));
  Matrix<Scalar> n = Matrix<Scalar>::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k) n(k, k) = Scalar(static_cast<double>(k));
  return n;
}

enum class Pauli { x, y, z, plus, minus };

/// Basis order {|+>, |->}, sigma_z |-> = -|->.
CMatrix pauli_matrix(Pauli which);

QOperator annihilation(Index dim);
QOperator creation(Index dim);
QOperator number(Index dim);
QOperator pauli(Pauli which);
QOperator identity(const SpaceLayout& layout);

/// Lifts a single-subsystem operator into slot `slot` of `layout`.
QOperator embed(const QOperator& op, const SpaceLayout& layout, std::size_t slot);

/// True when |alpha|^2 + 4|alpha| exceeds the highest kept Fock level.
bool displacement_truncation_risk(Index dim, Complex alpha);

/// exp(alpha a^dag - alpha^* a) on the truncated space. Warns (does not
/// throw) when the truncation is too tight for alpha.
QOperator displacement(Index dim, Complex alpha);

}  // namespace qsync
