#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qsync/linalg.hpp"
#include "qsync/metrics.hpp"
#include "qsync/slmp.hpp"

using namespace qsync;

namespace {

constexpr Real kPi = std::numbers::pi;

SystemSpec fig1_with(Real theta2) { return SystemSpec::two_mode(0.95, 1.01, 0.2, 0.21, 0.0, theta2, 0.1); }

struct Signals {
  std::vector<Real> t, x1, x2, p1;
};

// Position and momentum quadratures of a_k(t) = amp_k e^{sign i w t}.
Signals rotating(Real w, Complex amp1, Complex amp2, int sign, Real t0 = 0.0) {
  Signals s;
  for (Real t : linspace(t0, t0 + 400.0, 4000)) {
    const Complex r = std::exp(Complex(0, sign * w * t));
    s.t.push_back(t);
    s.x1.push_back(kPositionScale * (amp1 * r).real());
    s.x2.push_back(kPositionScale * (amp2 * r).real());
    s.p1.push_back(kPositionScale * (amp1 * r).imag());
  }
  return s;
}

}  // namespace

TEST_CASE("phase wrapping") {
  CHECK(wrap_phase(kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(3 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(0.5 - 4 * kPi) == doctest::Approx(0.5));
  CHECK(phase_distance(kPi - 0.01, -kPi + 0.01) == doctest::Approx(0.02));
  oracle::Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Real w = wrap_phase(rng.uniform(-50, 50));
    CHECK(w > -kPi);
    CHECK(w <= kPi);
  }
}

TEST_CASE("coherent asymptote at Fig. 1") {
  const AsymptoticPrediction p = analytic_asymptote(fig1_with(kPi / 4), 0.7, 0.0);
  const Real gamma = std::atan(20.0 / 21.0);
  const Real c = std::cos(gamma), s = std::sin(gamma);
  CHECK(std::abs(std::abs(p.amp[0]) - 0.7 * c * c) < 1e-15);
  CHECK(std::abs(std::abs(p.amp[1]) - 0.7 * s * c) < 1e-15);
  CHECK(std::abs(std::abs(p.amp[0]) - 0.36706) < 1e-5);
  CHECK(std::abs(std::abs(p.amp[1]) - 0.34959) < 1e-5);
  CHECK(std::abs(p.phase_diff - 3 * kPi / 4) < 1e-12);
  CHECK(std::abs(p.omega_sync - transform_params(fig1_with(kPi / 4)).omega_tilde[0]) == 0.0);
}

TEST_CASE("asymptote limiting cases") {
  const AsymptoticPrediction zero = analytic_asymptote(fig1_with(kPi / 4), 0.0, 0.0);
  CHECK(std::abs(zero.amp[0]) == 0.0);
  CHECK(std::abs(zero.amp[1]) == 0.0);
  CHECK(std::abs(analytic_asymptote(fig1_with(0.0), 0.7, 0.0).phase_diff - kPi) < 1e-12);
  CHECK(std::abs(analytic_asymptote(fig1_with(kPi), 0.7, 0.0).phase_diff) < 1e-12);
  CHECK_THROWS_AS(analytic_asymptote(chain_spec({1, 1, 1}, 1, {0.1, 0.1}, 0.1, 1), 0.7, 0.0), ShapeError);
}

TEST_CASE("equal phases with one excited oscillator always give opposite phases") {
  oracle::Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const Real theta = rng.uniform(0, 2 * kPi);
    const auto spec = SystemSpec::two_mode(rng.uniform(0.8, 1.2), rng.uniform(0.8, 1.2), rng.uniform(0.01, 0.4),
                                           rng.uniform(0.01, 0.4), theta, theta, 0.1);
    const AsymptoticPrediction p = analytic_asymptote(spec, rng.complex(1.0) + 0.01, 0.0);
    CHECK(phase_distance(p.phase_diff, kPi) < 1e-12);
  }
}

TEST_CASE("asymptote is linear in the initial amplitudes") {
  oracle::Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = SystemSpec::two_mode(rng.uniform(0.8, 1.2), rng.uniform(0.8, 1.2), rng.uniform(0.01, 0.4),
                                           rng.uniform(0.01, 0.4), rng.uniform(0, 6), rng.uniform(0, 6), 0.1);
    const Complex a1 = rng.complex(1.0), a2 = rng.complex(1.0), scale = rng.complex(2.0);
    const AsymptoticPrediction base = analytic_asymptote(spec, a1, a2);
    const AsymptoticPrediction scaled = analytic_asymptote(spec, scale * a1, scale * a2);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(scaled.amp[k] - scale * base.amp[k]) < 1e-12);
  }
}

TEST_CASE("asymptotic amplitude never exceeds the initial amplitude") {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Real g1 = rng.uniform(0.01, 0.4), g2 = rng.uniform(0.01, 0.4);
    const Real t1 = rng.uniform(0, 6), t2 = rng.uniform(0, 6);
    const auto spec = SystemSpec::two_mode(1.0, 1.1, g1, g2, t1, t2, 0.1);
    const Real gamma = mixing_angle(g1, g2);
    const Complex rel = std::polar(1.0, kPi - (t2 - t1));

    // Along (cos g, e^{i(pi - dtheta)} sin g) nothing is lost.
    const Complex lambda = rng.complex(1.0) + 0.05;
    const Complex b1 = lambda * std::cos(gamma), b2 = lambda * rel * std::sin(gamma);
    const AsymptoticPrediction kept = analytic_asymptote(spec, b1, b2);
    const Real before = std::norm(b1) + std::norm(b2);
    CHECK(std::abs(std::norm(kept.amp[0]) + std::norm(kept.amp[1]) - before) < 1e-12);

    const Complex a1 = rng.complex(1.0), a2 = rng.complex(1.0);
    const AsymptoticPrediction generic = analytic_asymptote(spec, a1, a2);
    CHECK(std::norm(generic.amp[0]) + std::norm(generic.amp[1]) < std::norm(a1) + std::norm(a2));
  }
}

TEST_CASE("fit recovers a synthetic cosine pair") {
  std::vector<Real> t, x1, x2;
  for (Real ti : linspace(0.0, 400.0, 4000)) {
    t.push_back(ti);
    x1.push_back(std::cos(0.97 * ti));
    x2.push_back(std::cos(0.97 * ti + 2.356));
  }
  const SyncEstimate e = fit_sync(t, x1, x2);
  REQUIRE(e.oscillating);
  CHECK(std::abs(e.omega_fit - 0.97) < 1e-6);
  CHECK(std::abs(e.phase_diff - 2.356) < 1e-6);
  CHECK(std::abs(e.oscillators[0].amplitude - 1.0) < 1e-6);
  CHECK(e.fit_residual >= 0.0);
  CHECK(e.fit_residual < 1e-6);
  CHECK(e.t_start >= t.front());
  CHECK(e.t_end == t.back());
  CHECK(e.rotation_sign == 1);
}

TEST_CASE("quadratures fix the rotation convention") {
  const Complex amp1 = std::polar(0.4, 0.3), amp2 = std::polar(0.35, 0.3 + 3 * kPi / 4);
  for (int sign : {1, -1}) {
    const Signals s = rotating(0.98, amp1, amp2, sign);
    const SyncEstimate e = fit_sync(s.t, s.x1, s.x2, FitOptions{}, s.p1);
    CHECK(e.rotation_sign == sign);
    CHECK(std::abs(e.omega_fit - 0.98) < 1e-6);
    CHECK(phase_distance(e.oscillators[0].phase, 0.3) < 1e-6);
    CHECK(phase_distance(e.phase_diff, 3 * kPi / 4) < 1e-6);
    CHECK(std::abs(e.oscillators[1].amplitude - kPositionScale * 0.35) < 1e-6);
  }
}

TEST_CASE("fitted phase difference is invariant under time shifts") {
  oracle::Rng rng(77);
  const Complex amp1 = std::polar(0.4, 0.1), amp2 = std::polar(0.3, 2.0);
  const Signals base = rotating(0.97, amp1, amp2, 1);
  const Real reference = fit_sync(base.t, base.x1, base.x2).phase_diff;
  for (int trial = 0; trial < 10; ++trial) {
    const Real shift = rng.uniform(-100, 100);
    // Same physical signal sampled on a shifted clock.
    Signals s;
    for (std::size_t i = 0; i < base.t.size(); ++i) {
      s.t.push_back(base.t[i] + shift);
      s.x1.push_back(base.x1[i]);
      s.x2.push_back(base.x2[i]);
    }
    CHECK(phase_distance(fit_sync(s.t, s.x1, s.x2).phase_diff, reference) < 1e-6);
  }
}

TEST_CASE("flat signals are flagged as not oscillating") {
  const std::vector<Real> t = linspace(0.0, 100.0, 200);
  const std::vector<Real> zero(t.size(), 0.0), tiny(t.size(), 3e-7);
  const SyncEstimate e = fit_sync(t, zero, tiny);
  CHECK_FALSE(e.oscillating);
  CHECK(e.max_abs_signal == doctest::Approx(3e-7));
  CHECK_THROWS_AS(fit_sync(t, zero, std::vector<Real>(5, 0.0)), ShapeError);
  FitOptions wide;
  wide.window_fraction = 0.7;
  CHECK_THROWS_AS(fit_sync(t, zero, zero, wide), InvalidArgument);
}

TEST_CASE("expectation values") {
  const SpaceLayout single({oscillator(30)});
  CVector vac = CVector::Unit(30, 0);
  CHECK(expectation(DensityState::pure(single, vac), number(30)) == Complex(0.0));

  const CVector coh = oracle::coherent_amplitudes(30, 0.7);
  const DensityState state = DensityState::pure(single, coh);
  CHECK(std::abs(expectation(state, annihilation(30)) - 0.7) < 1e-6);

  const QOperator x = Complex(1.0 / kPositionScale) * (annihilation(30) + creation(30));
  CHECK(std::abs(expectation(state, x).imag()) < 1e-12);
  CHECK_THROWS_AS(expectation(state, pauli(Pauli::z)), ShapeError);
}

TEST_CASE("agreement report") {
  const AsymptoticPrediction p = analytic_asymptote(fig1_with(kPi / 4), 0.7, 0.0);
  SyncEstimate e;
  e.oscillating = true;
  e.omega_fit = p.omega_sync;
  e.phase_diff = p.phase_diff;
  for (int k = 0; k < 2; ++k) e.oscillators[k].amplitude = kPositionScale * std::abs(p.amp[k]);
  const AgreementReport same = compare(p, e);
  CHECK(same.pass);
  CHECK(same.frequency_rel_error == 0.0);
  CHECK(same.phase_error == 0.0);
  CHECK(same.amplitude_errors[0] == 0.0);
  CHECK(same.amplitude_errors[1] == 0.0);

  e.oscillators[0].amplitude *= 0.8;
  const AgreementReport low = compare(p, e);
  CHECK_FALSE(low.amplitude_pass);
  CHECK(low.phase_pass);
  CHECK(low.amplitude_errors[0] == doctest::Approx(0.2));

  const AsymptoticPrediction none = analytic_asymptote(fig1_with(kPi / 4), 0.0, 0.0);
  const SyncEstimate flat;
  const AgreementReport null_case = compare(none, flat);
  CHECK(null_case.pass);
  CHECK(null_case.no_oscillation);
  CHECK(null_case.amplitude_errors_absolute);
  CHECK(null_case.amplitude_errors[0] < 1e-6);

  const AgreementReport missing = compare(p, flat);
  CHECK_FALSE(missing.pass);
  CHECK(missing.no_oscillation);
}
