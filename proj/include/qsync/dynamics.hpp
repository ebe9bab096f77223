#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsync/errors.hpp"
#include "qsync/model.hpp"

namespace qsync {

struct StateDiagnostics {
  Real trace_error = 0.0;        // |tr(rho) - 1|
  Real hermiticity_error = 0.0;  // ||rho - rho^dag||_max
  Real min_eigenvalue = 0.0;
};

StateDiagnostics diagnose(const CMatrix& rho);

class DensityState {
 public:
  DensityState(SpaceLayout layout, CMatrix matrix);

  static DensityState pure(SpaceLayout layout, const CVector& psi);

  const SpaceLayout& layout() const { return layout_; }
  const CMatrix& matrix() const { return matrix_; }
  const StateDiagnostics& diagnostics() const { return diagnostics_; }

  bool is_physical(Real tol) const;

 private:
  SpaceLayout layout_;
  CMatrix matrix_;
  StateDiagnostics diagnostics_;
};

enum class TlsLevel { plus, minus };

struct InitialState {
  enum class Kind { coherent, fock };
  Kind kind = Kind::coherent;
  std::vector<Complex> alphas;  // coherent amplitudes, one per oscillator
  std::vector<Index> levels;    // Fock levels, one per oscillator
  TlsLevel tls = TlsLevel::minus;
};

/// Pure product state of the oscillators (coherent or Fock) and all TLSs in
/// the same level. Coherent parts are displaced vacua computed on an enlarged
/// space, cut to the layout and renormalized.
DensityState prepare_state(const SpaceLayout& layout, const InitialState& init);

struct SolverOptions {
  Real rel_tol = 1e-8;
  Real abs_tol = 1e-10;
  Real max_step = 0.0;  // 0 = unlimited (steps still land on grid points)
  int positivity_check_stride = 10;
  Real trace_limit = 1e-6;
  Real eigenvalue_limit = 1e-6;
  bool store_states = false;
  long max_steps = 50'000'000;
};

struct SolverStats {
  long accepted_steps = 0;
  long rejected_steps = 0;
  long rhs_evaluations = 0;
  long positivity_checks = 0;
  Real max_trace_error = 0.0;
  Real max_hermiticity_error = 0.0;
  Real min_eigenvalue = 0.0;  // smallest seen at checked steps
  /// Sum over accepted steps of the entrywise 1-norm of the local error estimate.
  Real error_estimate = 0.0;
};

struct NamedObservable {
  std::string name;
  QOperator op;
};

struct Trajectory {
  std::vector<Real> times;
  std::vector<std::string> keys;
  std::vector<std::vector<Complex>> records;  // records[time][key]
  std::vector<CMatrix> states;                // only with store_states
  SolverStats stats;
  std::optional<DensityState> final_state;

  std::size_t key_index(const std::string& key) const;
  bool has_key(const std::string& key) const;
  CVector series(const std::string& key) const;
  RVector real_series(const std::string& key) const;

  /// Bound on |error of <O>| implied by stats.error_estimate, for the
  /// observable registered under key.
  Real observable_error_bound(const std::string& key) const;

  std::vector<Real> observable_scales;  // ||O||_max per key
};

class PhysicalityViolation : public Error {
 public:
  PhysicalityViolation(const std::string& what, Real time, Trajectory partial)
      : Error(what), time_(time), partial_(std::move(partial)) {}

  Real time() const { return time_; }
  const Trajectory& partial() const { return partial_; }

 private:
  Real time_;
  Trajectory partial_;
};

/// Integrates the master equation with an adaptive Dormand-Prince 5(4)
/// scheme, recording <O> = tr(rho O) at every grid time.
Trajectory evolve(const LindbladGenerator& generator, const DensityState& rho0, std::span<const Real> t_grid,
                  std::span<const NamedObservable> observables, const SolverOptions& opts = {});

std::vector<Real> linspace(Real start, Real stop, std::size_t n);

}  // namespace qsync
