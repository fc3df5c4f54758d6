#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "common.hpp"
#include "modeinv/errors.hpp"
#include "modeinv/observables.hpp"

using namespace modeinv;

namespace {

constexpr double kPi = std::numbers::pi;

TruncationPolicy wide() {
  TruncationPolicy p;
  p.max_mode = 50000;
  return p;
}

}  // namespace

TEST(Observables, ZeroCouplingIsTrivial) {
  const ProbeSetup s = build_setup(test::natural(2, 1e-3, 0.0));
  const FieldPreparation prep{2, 5};
  const EtaPhase e = eta_phase(s, prep, TruncationPolicy{});
  EXPECT_EQ(e.eta, std::complex<double>(0.0, 0.0));
  EXPECT_EQ(e.gamma, 0.0);
  EXPECT_EQ(e.visibility, 1.0);
  EXPECT_EQ(transition_probability(s, prep, TruncationPolicy{}).total, 0.0);
  EXPECT_EQ(validity(s, prep).value, 0.0);
}

TEST(Observables, RotatingTermAbsentForEvenResonance) {
  const ProbeSetup s = build_setup(test::natural(2));
  const TransitionProbability p = transition_probability(s, FieldPreparation{2, 7}, TruncationPolicy{});
  EXPECT_EQ(p.rotating, 0.0);
  EXPECT_EQ(p.total, p.counter_rotating + p.vacuum);
  EXPECT_GT(p.vacuum, 0.0);

  const ProbeSetup odd = build_setup(test::natural(1));
  const TransitionProbability q = transition_probability(odd, FieldPreparation{1, 7}, TruncationPolicy{});
  EXPECT_GT(q.rotating, 1e3 * q.counter_rotating);
}

TEST(Observables, ProbabilityLinearInPhotonsThroughCounterRotatingTerm) {
  const ProbeSetup s = build_setup(test::natural(2, 0.3));
  const auto p0 = transition_probability(s, FieldPreparation{2, 0}, TruncationPolicy{});
  const auto p4 = transition_probability(s, FieldPreparation{2, 4}, TruncationPolicy{});
  EXPECT_NEAR(p4.counter_rotating, 5.0 * p0.counter_rotating, 1e-12 * p4.counter_rotating);
  EXPECT_DOUBLE_EQ(p4.vacuum, p0.vacuum);
}

TEST(Observables, PhaseVisibilityRelations) {
  const ProbeSetup s = build_setup(test::microcavity());
  for (int n : {0, 10, 500}) {
    const EtaPhase e = eta_phase(s, FieldPreparation{2, n}, wide());
    EXPECT_DOUBLE_EQ(e.gamma, e.eta.real());
    EXPECT_GT(e.visibility, 0.0);
    EXPECT_LE(e.visibility, 1.0);
    EXPECT_NEAR(e.visibility, std::exp(-std::abs(e.eta.imag())), 1e-15);
  }
}

TEST(Observables, LogarithmAgreesWithExpansionForSmallEta) {
  const ProbeSetup s = build_setup(test::microcavity());
  for (int n : {0, 1, 5}) {
    const EtaPhase e = eta_phase(s, FieldPreparation{2, n}, wide());
    ASSERT_LT(std::abs(e.eta), 1e-2);
    const double lin = gamma_linearized(e);
    EXPECT_LE(std::abs(e.gamma - lin), std::norm(e.eta));
    EXPECT_LE(std::abs(e.gamma - lin), 1e-4 * std::abs(e.gamma));
  }
}

TEST(Observables, PhaseDifferenceBasics) {
  const ProbeSetup s = build_setup(test::microcavity());
  const TruncationPolicy p = wide();
  EXPECT_EQ(delta_gamma_exact(s, 2, 7, 0, p), 0.0);
  const double direct = eta_phase(s, FieldPreparation{2, 13}, p).gamma -
                        eta_phase(s, FieldPreparation{2, 10}, p).gamma;
  EXPECT_NEAR(delta_gamma_exact(s, 2, 10, 3, p), direct, 1e-12);
  EXPECT_THROW(delta_gamma_exact(s, 2, 1, -3, p), ConfigError);
}

TEST(Observables, PhaseDifferenceTelescopes) {
  const ProbeSetup s = build_setup(test::microcavity());
  const TruncationPolicy p = wide();
  for (int n : {0, 40, 700}) {
    const double whole = delta_gamma_exact(s, 2, n, 5, p);
    const double parts = delta_gamma_exact(s, 2, n, 2, p) + delta_gamma_exact(s, 2, n + 2, 3, p);
    EXPECT_NEAR(whole, parts, 1e-12 * std::abs(whole)) << n;
  }
}

TEST(Observables, LinearRegimeMatchesClosedEstimate) {
  const ProbeSetup s = build_setup(test::microcavity());
  EXPECT_NEAR(delta_gamma_linear(s, 2, 1), 7.5e-4, 1e-9);
  EXPECT_DOUBLE_EQ(delta_gamma_linear(s, 2, 2), 2.0 * delta_gamma_linear(s, 2, 1));
  EXPECT_THROW(delta_gamma_linear(s, 3, 1), ConfigError);
  for (int n = 0; n <= 10; ++n) {
    for (int m = 1; m <= 5; ++m) {
      const double exact = delta_gamma_exact(s, 2, n, m, wide());
      EXPECT_NEAR(exact / delta_gamma_linear(s, 2, m), 1.0, 0.01);
    }
  }
}

TEST(Observables, LinearEstimateIsLengthInvariant) {
  SetupParameters big = test::microcavity();
  big.cavity_length *= 1e3;
  const ProbeSetup a = build_setup(test::microcavity());
  const ProbeSetup b = build_setup(big);
  EXPECT_NEAR(delta_gamma_linear(b, 2, 1) / delta_gamma_linear(a, 2, 1), 1.0, 1e-12);
}

TEST(Observables, PhaseIsLengthInvariant) {
  SetupParameters small = test::natural(2);
  SetupParameters big = small;
  big.cavity_length = 1e3;
  const ProbeSetup a = build_setup(small);
  const ProbeSetup b = build_setup(big);
  for (int n : {0, 3, 50}) {
    const double ga = eta_phase(a, FieldPreparation{2, n}, wide()).gamma;
    const double gb = eta_phase(b, FieldPreparation{2, n}, wide()).gamma;
    EXPECT_LT(std::abs(gb - ga), 1e-6 * std::abs(ga)) << n;
  }
}

TEST(Observables, NaturalAndSiUnitsAgree) {
  SetupParameters nat = test::natural(2, 1e3 / 3e8);
  const ProbeSetup a = build_setup(test::microcavity());
  const ProbeSetup b = build_setup(nat);
  for (int n : {0, 100}) {
    const ProbeOutcome oa = probe_outcome(a, FieldPreparation{2, n}, wide());
    const ProbeOutcome ob = probe_outcome(b, FieldPreparation{2, n}, wide());
    EXPECT_NEAR(oa.gamma, ob.gamma, 1e-9 * std::abs(oa.gamma));
    EXPECT_NEAR(oa.visibility, ob.visibility, 1e-12);
    EXPECT_NEAR(oa.p_excite, ob.p_excite, 1e-6 * oa.p_excite);
  }
}

TEST(Observables, ResolutionCurveOrdering) {
  const ProbeSetup s = build_setup(test::microcavity());
  const ResolutionCurve c = resolution_curve(s, 2, {1, 2, 4}, 0, 3, wide());
  ASSERT_EQ(c.rows.size(), 12u);
  EXPECT_EQ(c.rows[0].m, 1);
  EXPECT_EQ(c.rows[4].m, 2);
  EXPECT_NEAR(c.rows[4].delta_gamma / c.rows[0].delta_gamma, 2.0, 0.01);
  EXPECT_NEAR(c.rows[8].delta_gamma / c.rows[0].delta_gamma, 4.0, 0.02);
  ASSERT_TRUE(c.threshold_n.has_value());
  EXPECT_EQ(*c.threshold_n, 3);
  const ResolutionCurve high = resolution_curve(s, 2, {1}, 0, 3, wide(), 1.0);
  EXPECT_FALSE(high.threshold_n.has_value());
  EXPECT_THROW(resolution_curve(s, 2, {1}, 3, 2, wide()), ConfigError);
}

TEST(Observables, FringePorts) {
  auto f = fringe_probabilities(0.0, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(f.p_plus, 1.0);
  EXPECT_DOUBLE_EQ(f.p_minus, 0.0);
  for (double v : {0.2, 0.9, 1.0}) {
    f = fringe_probabilities(kPi / 2.0, v, 0.0);
    EXPECT_NEAR(f.p_plus, 0.5, 1e-15);
    EXPECT_NEAR(f.p_minus, 0.5, 1e-15);
  }
  const ProbeSetup s = build_setup(test::microcavity());
  for (int n : {0, 3, 200}) {
    const FringeResult same = fringe(s, FieldPreparation{2, n}, FieldPreparation{2, n}, 0.0, wide());
    EXPECT_EQ(same.delta_gamma, 0.0);
  }
  const FringeResult diff = fringe(s, FieldPreparation{2, 0}, FieldPreparation{2, 1}, 0.3, wide());
  EXPECT_NEAR(diff.delta_gamma, delta_gamma_exact(s, 2, 0, 1, wide()), 1e-15);
  EXPECT_NEAR(diff.p_plus + diff.p_minus, 1.0, 1e-15);
}

TEST(Observables, FringeRejectsInvalidArm) {
  const ProbeSetup s = build_setup(test::natural(2, 1e-3, 1e-4));
  // (λ/Ω)·n·T = 1e-4 · 20000 · 1e3
  EXPECT_THROW(fringe(s, FieldPreparation{2, 0}, FieldPreparation{2, 20000}, 0.0, wide()),
               ValidityError);
}

TEST(Observables, ValidityEstimator) {
  const ProbeSetup s = build_setup(test::natural(2, 1e-3, 1e-4));
  EXPECT_EQ(validity(s, FieldPreparation{2, 0}).level, ValidityClass::ok);
  EXPECT_NEAR(validity(s, FieldPreparation{2, 3}).value, 0.3, 1e-15);
  EXPECT_NEAR(validity(s, FieldPreparation{2, 6}).value, 2.0 * validity(s, FieldPreparation{2, 3}).value,
              1e-15);
  EXPECT_EQ(validity(s, FieldPreparation{2, 3}).level, ValidityClass::marginal);
  EXPECT_EQ(validity(s, FieldPreparation{2, 10}).level, ValidityClass::invalid);

  SetupParameters microwave;
  microwave.units = UnitSystem::si;
  microwave.cavity_length = 1e-2;
  microwave.light_speed = 3e8;
  microwave.atom_speed = 10.0;
  microwave.coupling_ratio = 1e-6;
  microwave.gap = GapSpec{std::nullopt, 2, 0.0};
  const ProbeSetup mw = build_setup(microwave);
  EXPECT_NEAR(validity(mw, FieldPreparation{2, 1}).value, 1e-9, 1e-20);
  EXPECT_NEAR(validity(mw, FieldPreparation{2, 1000}).value, 1e-6, 1e-17);
  EXPECT_EQ(validity_name(ValidityClass::marginal), "marginal");
}

TEST(Observables, OutcomeWarnings) {
  const ProbeSetup s = build_setup(test::natural(2, 1e-3, 1e-4));
  const ProbeOutcome o = probe_outcome(s, FieldPreparation{2, 3}, TruncationPolicy{});
  bool flagged = false;
  for (const auto& w : o.warnings) flagged = flagged || w.find("marginal") != std::string::npos;
  EXPECT_TRUE(flagged);
}

TEST(Observables, BranchErrorWhenLogArgumentLeavesHalfPlane) {
  // Odd resonance: C₋,₁ = 2T²/π² is real, so a strong coupling pushes Re A below 0.
  const ProbeSetup s = build_setup(test::natural(1, 1e-3, 1e-2));
  EXPECT_THROW(eta_phase(s, FieldPreparation{1, 1}, TruncationPolicy{}), BranchError);
}
