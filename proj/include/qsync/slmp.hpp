#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qsync/model.hpp"

namespace qsync {

/// tan(gamma) = g1 / g2, gamma in [0, pi). Makes g1 cos(gamma) - g2 sin(gamma) vanish.
Real mixing_angle(Real g1, Real g2);

struct ConditionRatios {
  Real detuning_vs_coupling = 0.0;  // |w1-w2| |g1 g2| / (g1^2+g2^2)^{3/2}
  Real tunnelling_vs_decay = 0.0;   // |xi12| / Gamma
  Real rwa_parameter = 0.0;         // eta
};

struct ConditionVerdicts {
  bool detuning_vs_coupling = false;
  bool tunnelling_vs_decay = false;
  bool rwa_parameter = false;
  /// Conjunction of the three. The conditions are sufficient, not necessary.
  bool sufficient = false;
};

struct ConditionCheck {
  ConditionRatios ratios;
  ConditionVerdicts verdicts;
  Real threshold = 0.5;
};

/// Scalar quantities of the two-mode leaking-mode frame.
struct TwoModeParams {
  Real gamma_angle = 0.0;
  std::array<Real, 2> omega_tilde{};
  std::array<Real, 2> g_tilde{};
  Real xi12 = 0.0;
  Real eta = 0.0;
};

struct ModeDecomposition {
  std::vector<CVector> preserved;
  std::vector<CVector> leaking;
  std::vector<Real> surviving_frequencies;  // ascending

  Real frequency_spread() const;
};

struct SlmpReport {
  std::optional<TwoModeParams> two_mode;
  std::optional<ConditionCheck> conditions;
  ModeDecomposition modes;
};

TwoModeParams transform_params(const SystemSpec& spec);

ConditionCheck check_conditions(const SystemSpec& spec, Real threshold = 0.5);

/// Splits C^N into the span of the coupling rows v_jk = g_jk e^{i theta_jk}
/// (leaking) and its orthogonal complement (preserved). Both bases are
/// orthonormal and deterministic; each preserved vector has its
/// largest-magnitude component real and positive.
ModeDecomposition mode_decomposition(const RMatrix& couplings, const RMatrix& phases, const std::vector<Real>& omega);

SlmpReport analyze(const SystemSpec& spec, Real threshold = 0.5);

struct SlmpUnitaries {
  QOperator phase;     // exp(i theta1 n1 + i theta2 n2)
  QOperator rotation;  // exp[gamma (a1 a2^dag - a1^dag a2)]
};

SlmpUnitaries build_slmp_unitaries(const SystemSpec& spec);

/// Hamiltonian of the rotated frame, built directly from omega_tilde,
/// g_tilde and xi12 on the same layout as spec.
QOperator build_transformed_hamiltonian(const SystemSpec& spec);

/// Basis indices whose total oscillator excitation is <= max_excitation.
std::vector<Index> excitation_block(const SpaceLayout& layout, Index max_excitation);

/// Block margin used by the frame-equivalence check.
inline constexpr Index kSlmpBlockMargin = 2;

/// max-norm of (U_r U_p) H (U_r U_p)^dag - H_tilde on the inner block with
/// total excitation <= n_max - 2.
Real verify_slmp_equivalence(const SystemSpec& spec, Index n_max);

}  // namespace qsync
