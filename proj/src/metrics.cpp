#include "qsync/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qsync/errors.hpp"
#include "qsync/slmp.hpp"

namespace qsync {
namespace {

constexpr Real kPi = std::numbers::pi;

struct SineFit {
  Real amplitude, phase, offset, sq_residual;
};

// Linear least squares of x ~ alpha cos(w t) + beta sin(w t) + c at fixed w.
SineFit fit_at(Real w, std::span<const Real> t, std::span<const Real> x) {
  const Index n = static_cast<Index>(t.size());
  Eigen::Matrix<Real, Eigen::Dynamic, 3> design(n, 3);
  RVector rhs(n);
  for (Index i = 0; i < n; ++i) {
    design(i, 0) = std::cos(w * t[i]);
    design(i, 1) = std::sin(w * t[i]);
    design(i, 2) = 1.0;
    rhs(i) = x[i];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  const Real sq = (design * coef - rhs).squaredNorm();
  // alpha cos + beta sin = A cos(w t + phi) with A cos(phi) = alpha, A sin(phi) = -beta.
  return {std::hypot(coef(0), coef(1)), std::atan2(-coef(1), coef(0)), coef(2), sq};
}

Real projected_residual(Real w, std::span<const Real> t, std::span<const Real> x1, std::span<const Real> x2) {
  return fit_at(w, t, x1).sq_residual + fit_at(w, t, x2).sq_residual;
}

Real periodogram_peak(std::span<const Real> t, std::span<const Real> x) {
  const std::size_t n = t.size();
  const Real span = t.back() - t.front();
  Real mean = 0.0;
  for (Real v : x) mean += v;
  mean /= static_cast<Real>(n);

  const Real dt = span / static_cast<Real>(n - 1);
  const Real w_min = 2.0 * kPi / span;
  const Real w_max = kPi / dt;
  const Real dw = 2.0 * kPi / (span * 16.0);

  Real best_w = w_min, best_p = -1.0;
  for (Real w = w_min; w <= w_max; w += dw) {
    Real re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Real v = x[i] - mean;
      re += v * std::cos(w * t[i]);
      im += v * std::sin(w * t[i]);
    }
    const Real p = re * re + im * im;
    if (p > best_p) {
      best_p = p;
      best_w = w;
    }
  }
  return best_w;
}

template <typename F>
Real golden_section_min(F&& f, Real lo, Real hi, Real tol) {
  const Real inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  Real a = lo, b = hi;
  Real c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  Real fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Real max_deviation(std::span<const Real> x) {
  if (x.empty()) return 0.0;
  Real mean = 0.0;
  for (Real v : x) mean += v;
  mean /= static_cast<Real>(x.size());
  Real worst = 0.0;
  for (Real v : x) worst = std::max(worst, std::abs(v - mean));
  return worst;
}

Real max_magnitude(std::span<const Real> x) {
  Real worst = 0.0;
  for (Real v : x) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace

Real wrap_phase(Real phase) {
  Real r = std::remainder(phase, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Real phase_distance(Real a, Real b) {
  const Real d = std::abs(wrap_phase(a - b));
  return std::min(d, 2.0 * kPi - d);
}

AsymptoticPrediction analytic_asymptote(const SystemSpec& spec, Complex a1_0, Complex a2_0) {
  if (!spec.is_two_mode()) throw ShapeError("analytic asymptote requires two oscillators and one TLS");
  const TwoModeParams p = transform_params(spec);
  const Real c = std::cos(p.gamma_angle), s = std::sin(p.gamma_angle);
  const Complex rel = std::polar(1.0, kPi - (spec.phases(0, 1) - spec.phases(0, 0)));

  AsymptoticPrediction out;
  out.omega_sync = p.omega_tilde[0];
  out.amp[0] = a1_0 * c * c + a2_0 * std::conj(rel) * c * s;
  out.amp[1] = a1_0 * rel * c * s + a2_0 * s * s;
  out.phase_diff = wrap_phase(std::arg(out.amp[1]) - std::arg(out.amp[0]));
  return out;
}

SyncEstimate fit_sync(std::span<const Real> t, std::span<const Real> x1, std::span<const Real> x2,
                      const FitOptions& opts, std::span<const Real> p1) {
  if (t.size() != x1.size() || t.size() != x2.size() || (!p1.empty() && p1.size() != t.size()))
    throw ShapeError("time and signal lengths differ");
  if (!(opts.window_fraction > 0.0 && opts.window_fraction <= 0.5))
    throw InvalidArgument("window_fraction must be in (0, 0.5]");

  const std::size_t total = t.size();
  const std::size_t count =
      std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(opts.window_fraction * static_cast<Real>(total))));
  if (count > total) throw InvalidArgument("trajectory too short to fit");
  const std::size_t first = total - count;

  const auto tw = t.subspan(first), w1 = x1.subspan(first), w2 = x2.subspan(first);

  SyncEstimate est;
  est.t_start = tw.front();
  est.t_end = tw.back();
  est.max_abs_signal = std::max(max_magnitude(w1), max_magnitude(w2));
  const Real dev1 = max_deviation(w1), dev2 = max_deviation(w2);
  if (std::max(dev1, dev2) < opts.min_amplitude) return est;
  est.oscillating = true;

  const Real w0 = periodogram_peak(tw, dev1 >= opts.min_amplitude ? w1 : w2);
  const Real half_width = 2.0 * kPi / ((tw.back() - tw.front()) * 8.0);
  est.omega_fit = golden_section_min([&](Real w) { return projected_residual(w, tw, w1, w2); },
                                     std::max(w0 - half_width, 1e-12), w0 + half_width, 1e-11);

  const SineFit f1 = fit_at(est.omega_fit, tw, w1);
  const SineFit f2 = fit_at(est.omega_fit, tw, w2);
  est.fit_residual = std::sqrt((f1.sq_residual + f2.sq_residual) / static_cast<Real>(2 * count));

  if (!p1.empty()) {
    const SineFit fp = fit_at(est.omega_fit, tw, p1.subspan(first));
    // x = A cos(wt + c), p = A sin(wt + c) for e^{+iwt}, so phi_p - phi_x = -pi/2.
    est.rotation_sign = wrap_phase(fp.phase - f1.phase) < 0.0 ? 1 : -1;
  }
  const Real sign = est.rotation_sign;
  est.oscillators[0] = {f1.amplitude, wrap_phase(sign * f1.phase), f1.offset};
  est.oscillators[1] = {f2.amplitude, wrap_phase(sign * f2.phase), f2.offset};
  est.phase_diff = wrap_phase(est.oscillators[1].phase - est.oscillators[0].phase);
  return est;
}

SyncEstimate fit_sync(const Trajectory& traj, const std::array<std::string, 2>& keys, const FitOptions& opts) {
  const RVector x1 = traj.real_series(keys[0]);
  const RVector x2 = traj.real_series(keys[1]);
  RVector p1;
  if (opts.quadrature_keys) p1 = traj.real_series((*opts.quadrature_keys)[0]);
  return fit_sync(traj.times, std::span<const Real>(x1.data(), x1.size()), std::span<const Real>(x2.data(), x2.size()),
                  opts, std::span<const Real>(p1.data(), p1.size()));
}

Complex expectation(const DensityState& state, const QOperator& op) {
  if (!(state.layout() == op.layout())) throw ShapeError("state and operator layouts differ");
  return state.matrix().cwiseProduct(op.matrix().transpose()).sum();
}

AgreementReport compare(const AsymptoticPrediction& prediction, const SyncEstimate& estimate, const Tolerances& tol) {
  AgreementReport r;
  std::array<Real, 2> predicted{};
  for (int k = 0; k < 2; ++k) predicted[k] = kPositionScale * std::abs(prediction.amp[k]);
  const bool predicted_zero = std::max(predicted[0], predicted[1]) <= tol.amplitude_abs;
  const bool phase_defined = std::min(predicted[0], predicted[1]) > tol.amplitude_abs;

  r.no_oscillation = !estimate.oscillating;
  if (r.no_oscillation || predicted_zero) {
    r.amplitude_errors_absolute = true;
    for (int k = 0; k < 2; ++k) {
      const Real fitted = estimate.oscillating ? estimate.oscillators[k].amplitude : 0.0;
      r.amplitude_errors[k] = std::abs(fitted - predicted[k]);
    }
    r.amplitude_pass = std::max(r.amplitude_errors[0], r.amplitude_errors[1]) < tol.amplitude_abs;
    r.frequency_pass = r.phase_pass = r.amplitude_pass;
    r.pass = r.amplitude_pass;
    return r;
  }

  r.frequency_rel_error = std::abs(estimate.omega_fit - std::abs(prediction.omega_sync)) / std::abs(prediction.omega_sync);
  r.frequency_pass = r.frequency_rel_error <= tol.frequency_rel;

  r.phase_error = phase_defined ? phase_distance(estimate.phase_diff, prediction.phase_diff) : 0.0;
  r.phase_pass = r.phase_error <= tol.phase;

  r.amplitude_pass = true;
  for (int k = 0; k < 2; ++k) {
    const Real fitted = estimate.oscillators[k].amplitude;
    if (predicted[k] > tol.amplitude_abs) {
      r.amplitude_errors[k] = std::abs(fitted - predicted[k]) / predicted[k];
      r.amplitude_pass = r.amplitude_pass && r.amplitude_errors[k] <= tol.amplitude_rel;
    } else {
      r.amplitude_errors[k] = std::abs(fitted - predicted[k]);
      r.amplitude_pass = r.amplitude_pass && r.amplitude_errors[k] <= tol.amplitude_abs;
    }
  }
  r.pass = r.frequency_pass && r.phase_pass && r.amplitude_pass;
  return r;
}

}  // namespace qsync
