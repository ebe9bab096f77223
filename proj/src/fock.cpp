#include "qsync/fock.hpp"

#include <numeric>
#include <sstream>

#include "qsync/linalg.hpp"
#include "qsync/log.hpp"

namespace qsync {

Subsystem oscillator(Index dim) {
  if (dim < 2) throw InvalidDimension("oscillator dimension must be >= 2, got " + std::to_string(dim));
  return {SubsystemKind::oscillator, dim};
}

Subsystem tls() { return {SubsystemKind::tls, 2}; }

SpaceLayout::SpaceLayout(std::vector<Subsystem> subsystems) : subsystems_(std::move(subsystems)) {
  for (const auto& s : subsystems_) {
    if (s.kind == SubsystemKind::oscillator && s.dim < 2)
      throw InvalidDimension("oscillator dimension must be >= 2");
    if (s.kind == SubsystemKind::tls && s.dim != 2) throw InvalidDimension("tls dimension must be 2");
    dimension_ *= s.dim;
  }
}

SpaceLayout SpaceLayout::oscillators_and_tls(Index n_oscillators, Index n_max, Index n_tls) {
  std::vector<Subsystem> subs;
  for (Index k = 0; k < n_oscillators; ++k) subs.push_back(oscillator(n_max + 1));
  for (Index j = 0; j < n_tls; ++j) subs.push_back(tls());
  return SpaceLayout(std::move(subs));
}

Index SpaceLayout::index_of(std::span<const Index> levels) const {
  if (levels.size() != subsystems_.size()) throw ShapeError("level count does not match layout");
  Index idx = 0;
  for (std::size_t s = 0; s < levels.size(); ++s) {
    if (levels[s] < 0 || levels[s] >= subsystems_[s].dim) throw ShapeError("level out of range");
    idx = idx * subsystems_[s].dim + levels[s];
  }
  return idx;
}

std::vector<Index> SpaceLayout::levels_of(Index index) const {
  if (index < 0 || index >= dimension_) throw ShapeError("basis index out of range");
  std::vector<Index> levels(subsystems_.size());
  for (std::size_t s = subsystems_.size(); s-- > 0;) {
    levels[s] = index % subsystems_[s].dim;
    index /= subsystems_[s].dim;
  }
  return levels;
}

QOperator::QOperator(SpaceLayout layout, CMatrix matrix) : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != layout_.dimension() || matrix_.cols() != layout_.dimension()) {
    std::ostringstream os;
    os << "matrix " << matrix_.rows() << "x" << matrix_.cols() << " does not match layout dimension "
       << layout_.dimension();
    throw ShapeError(os.str());
  }
}

bool QOperator::is_hermitian(Real tol) const { return hermiticity_error(matrix_) < tol; }

QOperator& QOperator::operator+=(const QOperator& rhs) {
  if (!(layout_ == rhs.layout_)) throw ShapeError("layout mismatch in operator sum");
  matrix_ += rhs.matrix_;
  return *this;
}

QOperator& QOperator::operator-=(const QOperator& rhs) {
  if (!(layout_ == rhs.layout_)) throw ShapeError("layout mismatch in operator difference");
  matrix_ -= rhs.matrix_;
  return *this;
}

QOperator& QOperator::operator*=(Complex c) {
  matrix_ *= c;
  return *this;
}

QOperator operator*(const QOperator& lhs, const QOperator& rhs) {
  if (!(lhs.layout_ == rhs.layout_)) throw ShapeError("layout mismatch in operator product");
  return {lhs.layout_, lhs.matrix_ * rhs.matrix_};
}

CMatrix pauli_matrix(Pauli which) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (which) {
    case Pauli::x:
      m(0, 1) = m(1, 0) = 1.0;
      break;
    case Pauli::y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case Pauli::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Pauli::plus:  // |+><-|
      m(0, 1) = 1.0;
      break;
    case Pauli::minus:
      m(1, 0) = 1.0;
      break;
  }
  return m;
}

QOperator annihilation(Index dim) { return {SpaceLayout({oscillator(dim)}), annihilation_matrix(dim)}; }

QOperator creation(Index dim) { return annihilation(dim).adjoint(); }

QOperator number(Index dim) { return {SpaceLayout({oscillator(dim)}), number_matrix(dim)}; }

QOperator pauli(Pauli which) { return {SpaceLayout({tls()}), pauli_matrix(which)}; }

QOperator identity(const SpaceLayout& layout) {
  return {layout, CMatrix::Identity(layout.dimension(), layout.dimension())};
}

QOperator embed(const QOperator& op, const SpaceLayout& layout, std::size_t slot) {
  if (slot >= layout.size()) throw ShapeError("slot " + std::to_string(slot) + " out of range");
  if (op.layout().size() != 1) throw ShapeError("embed expects a single-subsystem operator");
  if (op.dim() != layout[slot].dim)
    throw ShapeError("operator dimension " + std::to_string(op.dim()) + " does not match slot dimension " +
                     std::to_string(layout[slot].dim));

  Index left = 1;
  for (std::size_t s = 0; s < slot; ++s) left *= layout[s].dim;
  const Index local = op.dim();
  const Index right = layout.dimension() / (left * local);

  const CMatrix& m = op.matrix();
  CMatrix out = CMatrix::Zero(layout.dimension(), layout.dimension());
  for (Index l = 0; l < left; ++l)
    for (Index i = 0; i < local; ++i)
      for (Index j = 0; j < local; ++j) {
        if (m(i, j) == Complex(0.0)) continue;
        for (Index r = 0; r < right; ++r)
          out((l * local + i) * right + r, (l * local + j) * right + r) = m(i, j);
      }
  return {layout, std::move(out)};
}

bool displacement_truncation_risk(Index dim, Complex alpha) {
  const Real r = std::abs(alpha);
  return r * r + 4.0 * r > static_cast<Real>(dim - 1);
}

QOperator displacement(Index dim, Complex alpha) {
  const CMatrix a = annihilation_matrix(dim);
  if (displacement_truncation_risk(dim, alpha)) {
    std::ostringstream os;
    os << "displacement alpha=" << alpha << " is close to the truncation edge (dim=" << dim << ")";
    warn(os.str());
  }
  const CMatrix generator = alpha * a.adjoint() - std::conj(alpha) * a;
  return {SpaceLayout({oscillator(dim)}), expm(generator)};
}

}  // namespace qsync
