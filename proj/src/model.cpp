#include "qsync/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsync/errors.hpp"

namespace qsync {

void SystemSpec::validate() const {
  const Index n = num_oscillators();
  const Index m = num_tls();
  if (n < 1) throw ShapeError("at least one oscillator is required");
  if (couplings.cols() != n) throw ShapeError("couplings must have one column per oscillator");
  if (phases.rows() != m || phases.cols() != n) throw ShapeError("phases must match the couplings shape");
  if (static_cast<Index>(gamma_decay.size()) != m) throw ShapeError("gamma_decay must have one rate per TLS");
  if (n_max < 1) throw InvalidDimension("n_max must be >= 1");
  for (Real w : omega)
    if (!(w > 0.0)) throw InvalidArgument("oscillator frequencies must be positive");
  if (!std::isfinite(omega0)) throw InvalidArgument("omega0 must be finite");
  for (Real g : gamma_decay)
    if (!(g >= 0.0)) throw InvalidArgument("decay rates must be non-negative");
  if (couplings.size() > 0 && !(couplings.minCoeff() >= 0.0))
    throw InvalidArgument("couplings must be non-negative");
  if (!phases.allFinite()) throw InvalidArgument("phases must be finite");
}

SystemSpec SystemSpec::two_mode(Real omega1, Real omega2, Real g1, Real g2, Real theta1, Real theta2, Real gamma,
                                Index n_max, Real omega0) {
  SystemSpec spec;
  spec.omega = {omega1, omega2};
  spec.omega0 = omega0;
  spec.couplings = RMatrix{{g1, g2}};
  spec.phases = RMatrix{{theta1, theta2}};
  spec.gamma_decay = {gamma};
  spec.n_max = n_max;
  return spec;
}

QOperator build_hamiltonian(const SystemSpec& spec) {
  spec.validate();
  const SpaceLayout layout = spec.layout();
  const Index osc_dim = spec.n_max + 1;
  const QOperator a = annihilation(osc_dim);
  const QOperator n = number(osc_dim);
  const QOperator sz = pauli(Pauli::z);
  const QOperator sx = pauli(Pauli::x);

  std::vector<QOperator> a_emb;
  CMatrix h = CMatrix::Zero(layout.dimension(), layout.dimension());
  for (Index k = 0; k < spec.num_oscillators(); ++k) {
    a_emb.push_back(embed(a, layout, spec.oscillator_slot(k)));
    h += spec.omega[k] * embed(n, layout, spec.oscillator_slot(k)).matrix();
  }
  for (Index j = 0; j < spec.num_tls(); ++j) {
    h += 0.5 * spec.omega0 * embed(sz, layout, spec.tls_slot(j)).matrix();
    const CMatrix sx_j = embed(sx, layout, spec.tls_slot(j)).matrix();
    for (Index k = 0; k < spec.num_oscillators(); ++k) {
      const Real g = spec.couplings(j, k);
      if (g == 0.0) continue;
      const CMatrix& ak = a_emb[k].matrix();
      const CMatrix field = std::polar(1.0, spec.phases(j, k)) * ak + std::polar(1.0, -spec.phases(j, k)) * ak.adjoint();
      h += g * field * sx_j;
    }
  }
  // Remove rounding asymmetry from the complex phase factors.
  h = 0.5 * (h + h.adjoint()).eval();
  return {layout, std::move(h)};
}

QOperator build_rwa_hamiltonian(Real omega2, Real omega0, Real g2, Index n_max) {
  const SpaceLayout layout = SpaceLayout::oscillators_and_tls(1, n_max, 1);
  const CMatrix a = embed(annihilation(n_max + 1), layout, 0).matrix();
  const CMatrix sp = embed(pauli(Pauli::plus), layout, 1).matrix();
  const CMatrix sz = embed(pauli(Pauli::z), layout, 1).matrix();
  CMatrix h = omega2 * a.adjoint() * a + 0.5 * omega0 * sz + g2 * (a * sp + a.adjoint() * sp.adjoint());
  return {layout, std::move(h)};
}

SystemSpec chain_spec(const std::vector<Real>& omega, Real omega0, const std::vector<Real>& g, Real gamma,
                      Index n_max) {
  if (omega.size() < 2 || g.size() + 1 != omega.size())
    throw ShapeError("chain needs len(g) = len(omega) - 1 with at least two oscillators");
  const Index n = static_cast<Index>(omega.size());
  const Index m = n - 1;
  SystemSpec spec;
  spec.omega = omega;
  spec.omega0 = omega0;
  spec.couplings = RMatrix::Zero(m, n);
  spec.phases = RMatrix::Zero(m, n);
  for (Index j = 0; j < m; ++j) {
    spec.couplings(j, j) = g[j];
    spec.couplings(j, j + 1) = g[j];
    spec.phases(j, j + 1) = std::numbers::pi;  // -a = e^{i pi} a
  }
  spec.gamma_decay.assign(m, gamma);
  spec.n_max = n_max;
  return spec;
}

QOperator build_chain_hamiltonian(const std::vector<Real>& omega, Real omega0, const std::vector<Real>& g,
                                  Index n_max) {
  return build_hamiltonian(chain_spec(omega, omega0, g, 0.0, n_max));
}

CMatrix LindbladGenerator::apply(const CMatrix& rho) const {
  const CMatrix& h = hamiltonian.matrix();
  CMatrix out = -kI * (h * rho - rho * h);
  for (const auto& jump : jumps) {
    const CMatrix& l = jump.op.matrix();
    const CMatrix ldl = l.adjoint() * l;
    out += jump.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

LindbladGenerator build_lindblad(const SystemSpec& spec) {
  spec.validate();
  const SpaceLayout layout = spec.layout();
  LindbladGenerator gen{build_hamiltonian(spec), {}};
  const QOperator sm = pauli(Pauli::minus);
  for (Index j = 0; j < spec.num_tls(); ++j) {
    const Real rate = spec.gamma_decay[j];
    if (rate < 0.0) throw InvalidArgument("negative decay rate");
    gen.jumps.push_back({embed(sm, layout, spec.tls_slot(j)), rate});
  }
  return gen;
}

}  // namespace qsync
