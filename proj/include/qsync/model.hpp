#pragma once

#include <vector>

#include "qsync/fock.hpp"

namespace qsync {

/// Physical parameters in units of the TLS splitting omega0.
///
/// couplings and phases are M x N (row j = TLS, column k = oscillator).
/// gamma_decay holds one rate per TLS.
struct SystemSpec {
  std::vector<Real> omega;
  Real omega0 = 1.0;
  RMatrix couplings;
  RMatrix phases;
  std::vector<Real> gamma_decay;
  Index n_max = 6;

  Index num_oscillators() const { return static_cast<Index>(omega.size()); }
  Index num_tls() const { return couplings.rows(); }
  bool is_two_mode() const { return num_oscillators() == 2 && num_tls() == 1; }

  /// Throws InvalidArgument / ShapeError on inconsistent or unphysical input.
  void validate() const;

  SpaceLayout layout() const { return SpaceLayout::oscillators_and_tls(num_oscillators(), n_max, num_tls()); }
  std::size_t oscillator_slot(Index k) const { return static_cast<std::size_t>(k); }
  std::size_t tls_slot(Index j) const { return static_cast<std::size_t>(num_oscillators() + j); }

  /// The core two-oscillator, one-TLS model.
  static SystemSpec two_mode(Real omega1, Real omega2, Real g1, Real g2, Real theta1, Real theta2, Real gamma,
                             Index n_max = 6, Real omega0 = 1.0);
};

struct JumpOperator {
  QOperator op;
  Real rate;
};

/// rho' = -i[H, rho] + sum_j rate_j (L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho})
struct LindbladGenerator {
  QOperator hamiltonian;
  std::vector<JumpOperator> jumps;

  CMatrix apply(const CMatrix& rho) const;
};

QOperator build_hamiltonian(const SystemSpec& spec);

/// Jaynes-Cummings form omega2 a^dag a + omega0/2 sigma_z + g2 (a sigma_+ + a^dag sigma_-)
/// on [osc(n_max+1), tls].
QOperator build_rwa_hamiltonian(Real omega2, Real omega0, Real g2, Index n_max);

/// Chain of N oscillators where TLS j couples to (a_j - a_{j+1} + h.c.).
SystemSpec chain_spec(const std::vector<Real>& omega, Real omega0, const std::vector<Real>& g, Real gamma,
                      Index n_max);
QOperator build_chain_hamiltonian(const std::vector<Real>& omega, Real omega0, const std::vector<Real>& g,
                                  Index n_max);

LindbladGenerator build_lindblad(const SystemSpec& spec);

}  // namespace qsync
