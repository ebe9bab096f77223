#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "qsync/dynamics.hpp"
#include "qsync/model.hpp"

namespace qsync {

/// Wraps to (-pi, pi].
Real wrap_phase(Real phase);

/// min(|a - b|, 2 pi - |a - b|) after wrapping.
Real phase_distance(Real a, Real b);

/// Long-time prediction for the two-mode model: <a_k>(t) -> amp_k rotating at
/// omega_sync.
struct AsymptoticPrediction {
  Real omega_sync = 0.0;
  std::array<Complex, 2> amp{};
  Real phase_diff = 0.0;  // arg(amp_2) - arg(amp_1), wrapped
};

AsymptoticPrediction analytic_asymptote(const SystemSpec& spec, Complex a1_0, Complex a2_0);

struct OscillatorFit {
  Real amplitude = 0.0;
  Real phase = 0.0;
  Real offset = 0.0;
};

struct SyncEstimate {
  bool oscillating = false;  // false: tail amplitude below threshold, nothing fitted
  Real omega_fit = 0.0;
  std::array<OscillatorFit, 2> oscillators{};
  Real phase_diff = 0.0;
  Real fit_residual = 0.0;
  Real t_start = 0.0;
  Real t_end = 0.0;
  /// +1 when the complex amplitude turns as e^{+i w t}, -1 for e^{-i w t}.
  /// Phases are reported in that rotation's complex-amplitude convention.
  int rotation_sign = 1;
  Real max_abs_signal = 0.0;
};

struct FitOptions {
  Real window_fraction = 0.25;
  Real min_amplitude = 1e-6;
  /// Conjugate-quadrature series (p_k for x_k). When present, the rotation
  /// sense of oscillator 1 is measured and phases follow its convention;
  /// otherwise each signal is read as A cos(w t + phi).
  std::optional<std::array<std::string, 2>> quadrature_keys;
};

/// Fits A_k cos(w t + phi_k) + c_k with a shared w to two real signals over
/// the trailing window_fraction of the samples.
SyncEstimate fit_sync(std::span<const Real> t, std::span<const Real> x1, std::span<const Real> x2,
                      const FitOptions& opts = {}, std::span<const Real> p1 = {});

SyncEstimate fit_sync(const Trajectory& traj, const std::array<std::string, 2>& keys, const FitOptions& opts = {});

Complex expectation(const DensityState& state, const QOperator& op);

/// x_k = (a_k + a_k^dag) / sqrt(2); fitted position amplitudes compare to
/// sqrt(2) |amp_k|.
inline constexpr Real kPositionScale = 1.4142135623730951;

struct Tolerances {
  Real frequency_rel = 0.02;
  Real phase = 0.15;
  Real amplitude_rel = 0.15;
  Real amplitude_abs = 1e-6;
};

struct AgreementReport {
  Real frequency_rel_error = 0.0;
  Real phase_error = 0.0;
  std::array<Real, 2> amplitude_errors{};
  bool amplitude_errors_absolute = false;
  bool frequency_pass = false;
  bool phase_pass = false;
  bool amplitude_pass = false;
  bool no_oscillation = false;
  bool pass = false;
};

AgreementReport compare(const AsymptoticPrediction& prediction, const SyncEstimate& estimate,
                        const Tolerances& tol = {});

}  // namespace qsync
