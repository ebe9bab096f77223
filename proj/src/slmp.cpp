#include "qsync/slmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qsync/errors.hpp"
#include "qsync/linalg.hpp"
#include "qsync/log.hpp"

namespace qsync {
namespace {

void require_two_mode(const SystemSpec& spec) {
  if (!spec.is_two_mode()) throw ShapeError("operation requires exactly two oscillators and one TLS");
}

// Pivoted Gram-Schmidt: repeatedly takes the candidate with the largest
// remaining norm (lowest index on ties), stopping below tol.
std::vector<CVector> pivoted_gram_schmidt(std::vector<CVector> candidates, const std::vector<CVector>& against,
                                          Real tol) {
  auto project_out = [](CVector& v, const CVector& q) { v -= q * q.dot(v); };
  for (auto& c : candidates)
    for (const auto& q : against) project_out(c, q);

  std::vector<CVector> basis;
  std::vector<bool> used(candidates.size(), false);
  while (true) {
    Real best = tol;
    std::size_t pick = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      const Real n = candidates[i].norm();
      if (n > best) {
        best = n;
        pick = i;
      }
    }
    if (pick == candidates.size()) break;
    used[pick] = true;
    CVector q = candidates[pick] / best;
    // Second projection pass for numerical orthogonality.
    for (const auto& b : basis) project_out(q, b);
    for (const auto& b : against) project_out(q, b);
    q.normalize();
    basis.push_back(q);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (!used[i]) project_out(candidates[i], q);
  }
  return basis;
}

void fix_global_phase(CVector& v) {
  Index arg = 0;
  Real best = -1.0;
  for (Index k = 0; k < v.size(); ++k) {
    if (std::abs(v(k)) > best + 1e-14) {
      best = std::abs(v(k));
      arg = k;
    }
  }
  if (best > 0.0) v *= std::conj(v(arg)) / best;
  v(arg) = Complex(std::abs(v(arg)), 0.0);
}

// Angle of the leaking-mode frame. With both couplings zero every angle
// diagonalizes the (absent) interaction, and 0 keeps the frame trivial.
Real frame_angle(Real g1, Real g2) { return g1 == 0.0 && g2 == 0.0 ? 0.0 : mixing_angle(g1, g2); }

}  // namespace

Real mixing_angle(Real g1, Real g2) {
  if (g1 < 0.0) throw InvalidArgument("g1 must be non-negative");
  if (g1 == 0.0 && g2 == 0.0) throw InvalidArgument("mixing angle undefined when both couplings vanish");
  const Real gamma = std::atan2(g1, g2);
  return gamma >= std::numbers::pi ? 0.0 : gamma;
}

TwoModeParams transform_params(const SystemSpec& spec) {
  require_two_mode(spec);
  const Real w1 = spec.omega[0], w2 = spec.omega[1];
  const Real g1 = spec.couplings(0, 0), g2 = spec.couplings(0, 1);
  TwoModeParams p;
  p.gamma_angle = frame_angle(g1, g2);
  const Real c = std::cos(p.gamma_angle), s = std::sin(p.gamma_angle);
  p.omega_tilde = {w1 * c * c + w2 * s * s, w1 * s * s + w2 * c * c};
  p.g_tilde = {g1 * c - g2 * s, std::hypot(g1, g2)};
  p.xi12 = (w1 - w2) * s * c;
  p.eta = std::sqrt((g1 * g1 + g2 * g2) / (w1 * w1 + w2 * w2));
  return p;
}

ConditionCheck check_conditions(const SystemSpec& spec, Real threshold) {
  const TwoModeParams p = transform_params(spec);
  const Real g1 = spec.couplings(0, 0), g2 = spec.couplings(0, 1);
  const Real gamma = spec.gamma_decay[0];
  const Real g_sq = g1 * g1 + g2 * g2;

  ConditionCheck out;
  out.threshold = threshold;
  const Real detuning = std::abs(spec.omega[0] - spec.omega[1]);
  if (g_sq > 0.0)
    out.ratios.detuning_vs_coupling = detuning * std::abs(g1 * g2) / std::pow(g_sq, 1.5);
  else
    out.ratios.detuning_vs_coupling = detuning > 0.0 ? std::numeric_limits<Real>::infinity() : 0.0;
  out.ratios.tunnelling_vs_decay =
      gamma > 0.0 ? std::abs(p.xi12) / gamma : std::numeric_limits<Real>::infinity();
  out.ratios.rwa_parameter = p.eta;

  out.verdicts.detuning_vs_coupling = out.ratios.detuning_vs_coupling < threshold;
  out.verdicts.tunnelling_vs_decay = gamma > 0.0 && out.ratios.tunnelling_vs_decay < threshold;
  out.verdicts.rwa_parameter = out.ratios.rwa_parameter < threshold;
  out.verdicts.sufficient =
      out.verdicts.detuning_vs_coupling && out.verdicts.tunnelling_vs_decay && out.verdicts.rwa_parameter;
  return out;
}

Real ModeDecomposition::frequency_spread() const {
  if (surviving_frequencies.empty()) return 0.0;
  return surviving_frequencies.back() - surviving_frequencies.front();
}

ModeDecomposition mode_decomposition(const RMatrix& couplings, const RMatrix& phases, const std::vector<Real>& omega) {
  const Index n = couplings.cols();
  if (phases.rows() != couplings.rows() || phases.cols() != n) throw ShapeError("phases must match couplings");
  if (static_cast<Index>(omega.size()) != n) throw ShapeError("one frequency per oscillator required");

  std::vector<CVector> rows;
  Real largest = 0.0;
  for (Index j = 0; j < couplings.rows(); ++j) {
    CVector v(n);
    for (Index k = 0; k < n; ++k) v(k) = couplings(j, k) * std::polar(1.0, phases(j, k));
    largest = std::max(largest, v.norm());
    rows.push_back(std::move(v));
  }

  ModeDecomposition out;
  if (largest == 0.0) {
    warn("coupling matrix is zero; every mode is preserved");
  } else {
    out.leaking = pivoted_gram_schmidt(rows, {}, 1e-10 * largest);
  }

  std::vector<CVector> unit;
  for (Index k = 0; k < n; ++k) unit.push_back(CVector::Unit(n, k));
  out.preserved = pivoted_gram_schmidt(unit, out.leaking, 1e-10);
  if (static_cast<Index>(out.preserved.size() + out.leaking.size()) != n)
    throw Error("mode decomposition lost rank; subspace dimensions do not add up");
  for (auto& u : out.preserved) fix_global_phase(u);

  if (!out.preserved.empty()) {
    CMatrix q(n, static_cast<Index>(out.preserved.size()));
    for (std::size_t i = 0; i < out.preserved.size(); ++i) q.col(static_cast<Index>(i)) = out.preserved[i];
    const RVector w = Eigen::Map<const RVector>(omega.data(), n);
    const CMatrix reduced = q.adjoint() * w.cast<Complex>().asDiagonal() * q;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (reduced + reduced.adjoint()), Eigen::EigenvaluesOnly);
    for (Index i = 0; i < solver.eigenvalues().size(); ++i) out.surviving_frequencies.push_back(solver.eigenvalues()(i));
  }
  return out;
}

SlmpReport analyze(const SystemSpec& spec, Real threshold) {
  spec.validate();
  SlmpReport report;
  if (spec.is_two_mode()) {
    report.two_mode = transform_params(spec);
    report.conditions = check_conditions(spec, threshold);
  }
  report.modes = mode_decomposition(spec.couplings, spec.phases, spec.omega);
  return report;
}

SlmpUnitaries build_slmp_unitaries(const SystemSpec& spec) {
  require_two_mode(spec);
  const SpaceLayout layout = spec.layout();
  const Index dim = spec.n_max + 1;
  const CMatrix n1 = embed(number(dim), layout, 0).matrix();
  const CMatrix n2 = embed(number(dim), layout, 1).matrix();
  const CMatrix a1 = embed(annihilation(dim), layout, 0).matrix();
  const CMatrix a2 = embed(annihilation(dim), layout, 1).matrix();

  // Both generators are diagonal / excitation-conserving; the phase one is
  // exponentiated exactly.
  CVector phase_diag(layout.dimension());
  for (Index i = 0; i < layout.dimension(); ++i)
    phase_diag(i) = std::polar(1.0, spec.phases(0, 0) * n1(i, i).real() + spec.phases(0, 1) * n2(i, i).real());
  CMatrix up = phase_diag.asDiagonal();

  const Real gamma = frame_angle(spec.couplings(0, 0), spec.couplings(0, 1));
  const CMatrix generator = gamma * (a1 * a2.adjoint() - a1.adjoint() * a2);
  return {QOperator(layout, std::move(up)), QOperator(layout, expm(generator))};
}

QOperator build_transformed_hamiltonian(const SystemSpec& spec) {
  const TwoModeParams p = transform_params(spec);
  SystemSpec rotated = spec;
  rotated.omega = {p.omega_tilde[0], p.omega_tilde[1]};
  rotated.phases = RMatrix::Zero(1, 2);
  // g_tilde[0] may be a tiny negative rounding residue; keep the exact sign
  // by adding it to the operator directly rather than through the spec.
  rotated.couplings = RMatrix{{0.0, p.g_tilde[1]}};
  CMatrix h = build_hamiltonian(rotated).matrix();

  const SpaceLayout layout = spec.layout();
  const Index dim = spec.n_max + 1;
  const CMatrix a1 = embed(annihilation(dim), layout, 0).matrix();
  const CMatrix a2 = embed(annihilation(dim), layout, 1).matrix();
  const CMatrix sx = embed(pauli(Pauli::x), layout, 2).matrix();
  h += p.g_tilde[0] * (a1 + a1.adjoint()) * sx;
  h += p.xi12 * (a1.adjoint() * a2 + a2.adjoint() * a1);
  return {layout, std::move(h)};
}

std::vector<Index> excitation_block(const SpaceLayout& layout, Index max_excitation) {
  std::vector<Index> idx;
  for (Index i = 0; i < layout.dimension(); ++i) {
    const auto levels = layout.levels_of(i);
    Index total = 0;
    for (std::size_t s = 0; s < layout.size(); ++s)
      if (layout[s].kind == SubsystemKind::oscillator) total += levels[s];
    if (total <= max_excitation) idx.push_back(i);
  }
  return idx;
}

Real verify_slmp_equivalence(const SystemSpec& spec, Index n_max) {
  require_two_mode(spec);
  if (n_max < 4) throw InvalidDimension("equivalence check needs n_max >= 4");
  SystemSpec s = spec;
  s.n_max = n_max;
  const CMatrix h = build_hamiltonian(s).matrix();
  const CMatrix h_tilde = build_transformed_hamiltonian(s).matrix();
  const auto [up, ur] = build_slmp_unitaries(s);
  const CMatrix u = ur.matrix() * up.matrix();
  const CMatrix transformed = u * h * u.adjoint();
  const auto block = excitation_block(s.layout(), n_max - kSlmpBlockMargin);
  return max_abs(restrict_to(transformed - h_tilde, block));
}

}  // namespace qsync
