#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qsync/linalg.hpp"
#include "qsync/log.hpp"
#include "qsync/slmp.hpp"

using namespace qsync;

namespace {

constexpr Real kPi = std::numbers::pi;

SystemSpec fig1(Index n_max = 6) { return SystemSpec::two_mode(0.95, 1.01, 0.2, 0.21, 0.0, kPi / 4, 0.1, n_max); }

// Distance between two vectors after removing a global phase.
Real phase_free_distance(const CVector& a, const CVector& b) {
  const Complex overlap = b.dot(a);
  const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0);
  return max_abs(CVector(a - phase * b));
}

struct RandomCouplings {
  RMatrix g;
  RMatrix theta;
  std::vector<Real> omega;
};

RandomCouplings random_couplings(oracle::Rng& rng) {
  const Index n = rng.integer(2, 4);
  const Index m = rng.integer(1, n - 1);
  RandomCouplings r{RMatrix(m, n), RMatrix(m, n), {}};
  for (Index j = 0; j < m; ++j)
    for (Index k = 0; k < n; ++k) {
      r.g(j, k) = rng.uniform(0.0, 0.3);
      r.theta(j, k) = rng.uniform(0.0, 2 * kPi);
    }
  for (Index k = 0; k < n; ++k) r.omega.push_back(rng.uniform(0.8, 1.2));
  return r;
}

}  // namespace

TEST_CASE("mixing angle") {
  CHECK(std::abs(mixing_angle(0.3, 0.3) - kPi / 4) < 1e-15);
  CHECK(mixing_angle(0.0, 0.21) == 0.0);
  CHECK(std::abs(mixing_angle(0.2, 0.21) - std::atan(20.0 / 21.0)) < 1e-15);
  CHECK(std::abs(mixing_angle(0.2, 0.21) - 0.76101) < 1e-5);
  CHECK(std::abs(mixing_angle(0.2, 0.0) - kPi / 2) < 1e-15);
  CHECK_THROWS_AS(mixing_angle(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(mixing_angle(-0.1, 0.2), InvalidArgument);
}

TEST_CASE("mixing angle cancels the first rotated coupling") {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Real g1 = rng.uniform(0.0, 1.0);
    const Real g2 = rng.uniform(-1.0, 1.0);
    const Real gamma = mixing_angle(g1, g2);
    CHECK(gamma >= 0.0);
    CHECK(gamma < kPi);
    CHECK(std::abs(g1 * std::cos(gamma) - g2 * std::sin(gamma)) < 1e-12 * std::max(g1, std::abs(g2)));
  }
}

TEST_CASE("transformed parameters at Fig. 1") {
  const TwoModeParams p = transform_params(fig1());
  const Real c = std::cos(std::atan(20.0 / 21.0)), s = std::sin(std::atan(20.0 / 21.0));
  CHECK(std::abs(p.omega_tilde[0] - (0.95 * c * c + 1.01 * s * s)) < 1e-15);
  CHECK(std::abs(p.omega_tilde[0] - 0.97854) < 1e-5);
  CHECK(std::abs(p.omega_tilde[1] - 0.98146) < 1e-5);
  CHECK(std::abs(p.g_tilde[0]) < 1e-12);
  CHECK(std::abs(p.g_tilde[1] - 0.29) < 1e-15);
  CHECK(std::abs(p.xi12 - (-0.02996)) < 1e-5);
  CHECK(std::abs(p.eta - 0.20915) < 1e-5);
}

TEST_CASE("transformed parameters in limiting cases") {
  const TwoModeParams equal = transform_params(SystemSpec::two_mode(1.0, 1.0, 0.2, 0.21, 0.0, 0.0, 0.1));
  CHECK(equal.xi12 == 0.0);

  const auto decoupled2 = SystemSpec::two_mode(0.95, 1.01, 0.2, 0.0, 0.0, 0.0, 0.1);
  const TwoModeParams p = transform_params(decoupled2);
  CHECK(std::abs(p.gamma_angle - kPi / 2) < 1e-15);
  CHECK(std::abs(p.omega_tilde[0] - 1.01) < 1e-15);
  const ModeDecomposition modes = mode_decomposition(decoupled2.couplings, decoupled2.phases, decoupled2.omega);
  REQUIRE(modes.preserved.size() == 1);
  CHECK(max_abs(CVector(modes.preserved[0] - CVector::Unit(2, 1))) < 1e-15);
}

TEST_CASE("frequency rotation preserves the trace") {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Real w1 = rng.uniform(0.5, 1.5), w2 = rng.uniform(0.5, 1.5);
    const auto s = SystemSpec::two_mode(w1, w2, rng.uniform(0, 0.4), rng.uniform(0, 0.4), 0.0, 0.0, 0.1);
    const TwoModeParams p = transform_params(s);
    CHECK(std::abs(p.omega_tilde[0] + p.omega_tilde[1] - (w1 + w2)) < 1e-14);
  }
}

TEST_CASE("condition ratios") {
  const ConditionCheck fig = check_conditions(fig1());
  CHECK(std::abs(fig.ratios.detuning_vs_coupling - 0.1033) < 1e-4);
  CHECK(std::abs(fig.ratios.tunnelling_vs_decay - 0.2996) < 1e-4);
  CHECK(std::abs(fig.ratios.rwa_parameter - 0.2091) < 1e-4);
  CHECK(fig.verdicts.sufficient);
  CHECK(fig.threshold == 0.5);

  const ConditionCheck equal = check_conditions(SystemSpec::two_mode(1.0, 1.0, 0.2, 0.21, 0.0, 0.0, 0.1));
  CHECK(equal.ratios.detuning_vs_coupling == 0.0);
  CHECK(equal.ratios.tunnelling_vs_decay == 0.0);

  const ConditionCheck weak = check_conditions(SystemSpec::two_mode(0.9, 1.1, 0.01, 0.01, 0.0, 0.0, 0.1));
  const Real expected = 0.2 / (std::pow(0.0002, 1.5) / 0.0001);
  CHECK(std::abs(weak.ratios.detuning_vs_coupling - expected) < 1e-12 * expected);
  CHECK(weak.ratios.detuning_vs_coupling > 1.0);
  CHECK_FALSE(weak.verdicts.detuning_vs_coupling);
  CHECK_FALSE(weak.verdicts.sufficient);

  const ConditionCheck no_decay = check_conditions(SystemSpec::two_mode(0.95, 1.01, 0.2, 0.21, 0.0, 0.0, 0.0));
  CHECK(no_decay.ratios.tunnelling_vs_decay == std::numeric_limits<Real>::infinity());
  CHECK_FALSE(no_decay.verdicts.tunnelling_vs_decay);

  const ConditionCheck strict = check_conditions(fig1(), 0.1);
  CHECK_FALSE(strict.verdicts.rwa_parameter);
  CHECK(strict.ratios.rwa_parameter == fig.ratios.rwa_parameter);
}

TEST_CASE("condition ratios are non-negative") {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = SystemSpec::two_mode(rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), rng.uniform(0, 0.4),
                                        rng.uniform(0, 0.4), rng.uniform(0, 6), rng.uniform(0, 6), rng.uniform(0, 0.3));
    const ConditionCheck c = check_conditions(s);
    CHECK(c.ratios.detuning_vs_coupling >= 0.0);
    CHECK(c.ratios.tunnelling_vs_decay >= 0.0);
    CHECK(c.ratios.rwa_parameter >= 0.0);
  }
}

TEST_CASE("two-mode decomposition matches the closed form") {
  const SystemSpec s = fig1();
  const ModeDecomposition m = mode_decomposition(s.couplings, s.phases, s.omega);
  REQUIRE(m.preserved.size() == 1);
  REQUIRE(m.leaking.size() == 1);
  CVector expected(2);
  expected << 0.21, -std::polar(0.2, kPi / 4);
  expected /= 0.29;
  CHECK(max_abs(CVector(m.preserved[0] - expected)) < 1e-12);
  REQUIRE(m.surviving_frequencies.size() == 1);
  CHECK(std::abs(m.surviving_frequencies[0] - transform_params(s).omega_tilde[0]) < 1e-12);
  CHECK(m.frequency_spread() == 0.0);

  oracle::Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Real g1 = rng.uniform(0.01, 0.3), g2 = rng.uniform(0.01, 0.3);
    const Real t1 = rng.uniform(0, 2 * kPi), t2 = rng.uniform(0, 2 * kPi);
    const ModeDecomposition d = mode_decomposition(RMatrix{{g1, g2}}, RMatrix{{t1, t2}}, {1.0, 1.1});
    CVector preserved(2), leaking(2);
    preserved << std::polar(g2, t1), -std::polar(g1, t2);
    leaking << std::polar(g1, t1), std::polar(g2, t2);
    preserved.normalize();
    leaking.normalize();
    CHECK(phase_free_distance(d.preserved[0], preserved) < 1e-12);
    CHECK(phase_free_distance(d.leaking[0], leaking) < 1e-12);
  }
}

TEST_CASE("chain of three protects the uniform mode") {
  const SystemSpec s = chain_spec({0.95, 1.0, 1.05}, 1.0, {0.2, 0.25}, 0.1, 1);
  const ModeDecomposition m = mode_decomposition(s.couplings, s.phases, s.omega);
  CHECK(m.leaking.size() == 2);
  REQUIRE(m.preserved.size() == 1);
  const CVector uniform = CVector::Constant(3, 1.0 / std::sqrt(3.0));
  CHECK(max_abs(CVector(m.preserved[0] - uniform)) < 1e-12);
  CHECK(std::abs(m.surviving_frequencies[0] - 1.0) < 1e-12);
}

TEST_CASE("uncoupled modes survive at their bare frequencies") {
  const ModeDecomposition m = mode_decomposition(RMatrix{{0.3, 0.0, 0.0}}, RMatrix::Zero(1, 3), {0.9, 1.0, 1.2});
  REQUIRE(m.preserved.size() == 2);
  CHECK(max_abs(CVector(m.preserved[0] - CVector::Unit(3, 1))) < 1e-15);
  CHECK(max_abs(CVector(m.preserved[1] - CVector::Unit(3, 2))) < 1e-15);
  REQUIRE(m.surviving_frequencies.size() == 2);
  CHECK(std::abs(m.surviving_frequencies[0] - 1.0) < 1e-15);
  CHECK(std::abs(m.surviving_frequencies[1] - 1.2) < 1e-15);
  CHECK(std::abs(m.frequency_spread() - 0.2) < 1e-15);
}

TEST_CASE("zero couplings preserve everything and warn") {
  std::vector<std::string> messages;
  const auto previous = set_warning_handler([&](std::string_view msg) { messages.emplace_back(msg); });
  const ModeDecomposition m = mode_decomposition(RMatrix::Zero(1, 2), RMatrix::Zero(1, 2), {0.9, 1.1});
  set_warning_handler(previous);
  CHECK(m.preserved.size() == 2);
  CHECK(m.leaking.empty());
  CHECK(messages.size() == 1);
}

TEST_CASE("random decompositions are orthogonal and complete") {
  oracle::Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const RandomCouplings r = random_couplings(rng);
    const ModeDecomposition m = mode_decomposition(r.g, r.theta, r.omega);
    const Index n = r.g.cols();
    CHECK(static_cast<Index>(m.preserved.size() + m.leaking.size()) == n);
    for (const auto& u : m.preserved) {
      CHECK(std::abs(u.norm() - 1.0) < 1e-12);
      for (Index j = 0; j < r.g.rows(); ++j) {
        CVector v(n);
        for (Index k = 0; k < n; ++k) v(k) = r.g(j, k) * std::polar(1.0, r.theta(j, k));
        CHECK(std::abs(v.dot(u)) < 1e-12);
      }
    }
    CHECK(m.surviving_frequencies.size() == m.preserved.size());
  }
}

TEST_CASE("dependent rows give leaking dimension equal to the rank") {
  RMatrix g{{0.2, 0.1, 0.0}, {0.4, 0.2, 0.0}};  // second row = 2 x first
  const ModeDecomposition m = mode_decomposition(g, RMatrix::Zero(2, 3), {0.9, 1.0, 1.1});
  CHECK(m.leaking.size() == 1);
  CHECK(m.preserved.size() == 2);
}

TEST_CASE("decomposition is deterministic") {
  const SystemSpec s = chain_spec({0.95, 1.0, 1.05, 1.1}, 1.0, {0.2, 0.25, 0.3}, 0.1, 1);
  const ModeDecomposition a = mode_decomposition(s.couplings, s.phases, s.omega);
  const ModeDecomposition b = mode_decomposition(s.couplings, s.phases, s.omega);
  REQUIRE(a.preserved.size() == b.preserved.size());
  for (std::size_t i = 0; i < a.preserved.size(); ++i) CHECK(a.preserved[i] == b.preserved[i]);
  CHECK(a.surviving_frequencies == b.surviving_frequencies);
}

TEST_CASE("frame unitaries") {
  const auto trivial_phase = SystemSpec::two_mode(0.95, 1.01, 0.2, 0.21, 0.0, 0.0, 0.1, 4);
  const Index d = trivial_phase.layout().dimension();
  CHECK(max_abs(CMatrix(build_slmp_unitaries(trivial_phase).phase.matrix() - CMatrix::Identity(d, d))) == 0.0);

  const auto trivial_rotation = SystemSpec::two_mode(0.95, 1.01, 0.0, 0.21, 0.3, 0.4, 0.1, 4);
  CHECK(max_abs(CMatrix(build_slmp_unitaries(trivial_rotation).rotation.matrix() - CMatrix::Identity(d, d))) <
        1e-15);

  const SystemSpec s = fig1(8);
  const SpaceLayout layout = s.layout();
  const auto u = build_slmp_unitaries(s);
  const CMatrix a1 = embed(annihilation(9), layout, 0).matrix();
  const CMatrix a2 = embed(annihilation(9), layout, 1).matrix();
  const Real gamma = mixing_angle(0.2, 0.21);
  const CMatrix lhs = u.rotation.matrix() * a1 * u.rotation.matrix().adjoint();
  const CMatrix rhs = std::cos(gamma) * a1 + std::sin(gamma) * a2;
  const auto block = excitation_block(layout, 8 - kSlmpBlockMargin);
  CHECK(max_abs(restrict_to(CMatrix(lhs - rhs), block)) < 1e-8);

  // The rotation generator is an independent power series check of expm.
  const CMatrix generator = gamma * (a1 * a2.adjoint() - a1.adjoint() * a2);
  CHECK(max_abs(CMatrix(u.rotation.matrix() - oracle::series_expm(generator))) < 1e-12);

  // U_p a_k U_p^dag = e^{-i theta_k} a_k
  const CMatrix pa = u.phase.matrix() * a2 * u.phase.matrix().adjoint();
  CHECK(max_abs(CMatrix(pa - std::polar(1.0, -kPi / 4) * a2)) < 1e-15);
}

TEST_CASE("frame equivalence residual") {
  const auto free = SystemSpec::two_mode(0.95, 1.01, 0.0, 0.0, 0.0, 0.0, 0.1);
  CHECK(verify_slmp_equivalence(free, 5) < 1e-14);
  CHECK(verify_slmp_equivalence(fig1(), 8) < 1e-6);
  CHECK(verify_slmp_equivalence(SystemSpec::two_mode(0.95, 1.01, 0.2, 0.21, 0.3, 1.1, 0.1), 8) < 1e-6);
  CHECK_THROWS_AS(verify_slmp_equivalence(fig1(), 3), InvalidDimension);
}

TEST_CASE("excitation block") {
  const SpaceLayout layout = SpaceLayout::oscillators_and_tls(2, 2, 1);
  const auto block = excitation_block(layout, 1);
  CHECK(block.size() == 6);  // (0,0), (1,0), (0,1) times two TLS levels
  for (Index i : block) {
    const auto lv = layout.levels_of(i);
    CHECK(lv[0] + lv[1] <= 1);
  }
}

TEST_CASE("analysis report covers general and two-mode specs") {
  const SlmpReport two = analyze(fig1());
  CHECK(two.two_mode.has_value());
  CHECK(two.conditions.has_value());
  const SlmpReport chain = analyze(chain_spec({0.95, 1.0, 1.05}, 1.0, {0.2, 0.2}, 0.1, 1));
  CHECK_FALSE(chain.two_mode.has_value());
  CHECK(chain.modes.preserved.size() == 1);
}
