#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "common.hpp"
#include "modeinv/errors.hpp"
#include "modeinv/kernels.hpp"

using namespace modeinv;

namespace {

constexpr double kPi = std::numbers::pi;

std::complex<double> term(const ProbeSetup& s, int beta) {
  return std::conj(c_closed(s, beta, Sign::plus)) / (beta * kPi);
}

}  // namespace

TEST(Kernels, EvenResonantRotatingKernelVanishesExactly) {
  for (int alpha : {2, 4, 8}) {
    const ProbeSetup s = build_setup(test::natural(alpha));
    EXPECT_EQ(c_closed(s, alpha, Sign::minus), std::complex<double>(0.0, 0.0));
  }
  const ProbeSetup si = build_setup(test::microcavity());
  EXPECT_EQ(c_closed(si, 2, Sign::minus), std::complex<double>(0.0, 0.0));
}

TEST(Kernels, EvenResonantQuadratureNearZero) {
  const ProbeSetup s = build_setup(test::natural(2));
  const auto q = c_quadrature(s, 2, Sign::minus, 1e-11);
  const double scale = s.crossing_time() * s.crossing_time();
  EXPECT_LT(std::abs(q.value), 1e-10 * scale);
}

TEST(Kernels, ResonantCounterRotatingValue) {
  // Frozen from nested quadrature; the small-speed limit is i/(8π·10⁻³).
  const ProbeSetup s = build_setup(test::natural(2));
  const auto c = c_closed(s, 2, Sign::plus);
  EXPECT_NEAR(c.imag(), 39.7887457, 1e-6);
  EXPECT_NEAR(c.real(), 0.0, 1e-9);
  const auto nonrel = c_resonant_nonrel(s, 2);
  EXPECT_NEAR(nonrel.imag(), 1.0 / (8.0 * kPi * 1e-3), 1e-9);
  EXPECT_NEAR(nonrel.imag(), 39.788735773, 1e-8);
  const auto q = c_quadrature(s, 2, Sign::plus, 1e-11);
  EXPECT_LE(std::abs(q.value - c), 1e-8 * std::abs(c));
}

TEST(Kernels, SmallSpeedLimitApproached) {
  double previous = 1.0;
  for (double v : {1e-2, 1e-3, 1e-4}) {
    const ProbeSetup s = build_setup(test::natural(2, v));
    const double dev = std::abs(c_closed(s, 2, Sign::plus) / c_resonant_nonrel(s, 2) - 1.0);
    EXPECT_LT(dev, 10.0 * v) << v;
    EXPECT_LT(dev, previous);
    previous = dev;
  }
  EXPECT_THROW(c_resonant_nonrel(build_setup(test::natural(1)), 1), ConfigError);
}

TEST(Kernels, ScalesWithLengthSquared) {
  SetupParameters a = test::natural(2);
  SetupParameters b = a;
  b.cavity_length = 2.0;
  b.units = UnitSystem::natural;
  const ProbeSetup sa = build_setup(a);
  const ProbeSetup sb = build_setup(b);
  EXPECT_NEAR(std::abs(c_resonant_nonrel(sb, 2) / c_resonant_nonrel(sa, 2)), 4.0, 1e-12);
  EXPECT_NEAR(std::abs(c_closed(sb, 2, Sign::plus) / c_closed(sa, 2, Sign::plus)), 4.0, 1e-9);
  EXPECT_NEAR(std::abs(c_closed(sb, 5, Sign::plus) / c_closed(sa, 5, Sign::plus)), 4.0, 1e-9);
}

TEST(Kernels, OffResonantMatchesQuadrature) {
  const ProbeSetup s = build_setup(test::explicit_gap(5.3, 0.01));
  for (int beta : {1, 2, 3, 6}) {
    for (Sign sign : {Sign::plus, Sign::minus}) {
      const auto c = c_closed(s, beta, sign);
      for (InnerIntegral inner : {InnerIntegral::numeric, InnerIntegral::antiderivative}) {
        const auto q = c_quadrature(s, beta, sign, 1e-11, inner);
        EXPECT_LE(std::abs(c - q.value), 1e-8 * std::abs(c)) << beta;
      }
    }
  }
}

TEST(Kernels, RandomGridAgainstQuadrature) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> gap(0.5, 25.0);
  std::uniform_real_distribution<double> speed(-2.5, -1.0);
  std::uniform_int_distribution<int> beta(1, 6);
  for (int k = 0; k < 20; ++k) {
    const ProbeSetup s = build_setup(test::explicit_gap(gap(rng), std::pow(10.0, speed(rng))));
    const int b = beta(rng);
    const Sign sign = (k % 2) ? Sign::plus : Sign::minus;
    const auto c = c_closed(s, b, sign);
    const auto q = c_quadrature(s, b, sign, 1e-11, InnerIntegral::antiderivative);
    EXPECT_LE(std::abs(c - q.value), 1e-8 * std::abs(c)) << "case " << k;
  }
}

TEST(Kernels, NearResonanceBranchAgreesWithQuadrature) {
  const ProbeSetup s0 = build_setup(test::natural(1, 0.01));
  const double omega = s0.mode_frequency(1);
  for (double rel : {1e-10, 1e-7, 1e-5, 1e-3}) {
    const ProbeSetup s = build_setup(test::natural(1, 0.01, 1e-4, rel * omega));
    const auto c = c_closed(s, 1, Sign::minus);
    const auto q = c_quadrature(s, 1, Sign::minus, 1e-12);
    EXPECT_LE(std::abs(c - q.value), 1e-8 * std::abs(q.value)) << rel;
  }
  EXPECT_DOUBLE_EQ(kernel_guard(1e-6), 1e-3);
}

TEST(Kernels, ModeSumSelfConvergence) {
  const ProbeSetup s = build_setup(test::natural(2));
  TruncationPolicy p;
  p.max_mode = 20000;
  const ModeSum a = mode_sum_offres(s, FieldPreparation{2, 0}, p);
  ASSERT_TRUE(a.report.converged);
  EXPECT_TRUE(a.warnings.empty());
  p.max_mode = 40000;
  const ModeSum b = mode_sum_offres(s, FieldPreparation{2, 0}, p);
  EXPECT_LE(std::abs(a.value - b.value), p.tail_tol * std::abs(b.value));

  // Forcing many more explicit terms must agree with the analytic tail.
  TruncationPolicy tight = p;
  tight.tail_tol = 1e-14;
  tight.max_mode = 4000;
  const ModeSum c = mode_sum_offres(s, FieldPreparation{2, 0}, tight);
  EXPECT_LE(std::abs(a.value - c.value), 1e-8 * std::abs(b.value));
}

TEST(Kernels, ModeSumSetAlgebra) {
  const ProbeSetup s = build_setup(test::natural(2));
  TruncationPolicy p;
  p.fixed_cutoff = true;
  p.max_mode = 300;
  const ModeSum without2 = mode_sum_offres(s, FieldPreparation{2, 0}, p);
  const ModeSum without3 = mode_sum_offres(s, FieldPreparation{3, 0}, p);
  std::complex<double> all;
  for (int beta = 1; beta <= 300; ++beta) all += term(s, beta);
  EXPECT_LE(std::abs(without2.value - (all - term(s, 2))), 1e-12 * std::abs(all));
  EXPECT_LE(std::abs(without2.value + term(s, 2) - without3.value - term(s, 3)),
            1e-12 * std::abs(all));
  EXPECT_EQ(without2.report.modes_used, 299);
  EXPECT_TRUE(without2.report.fixed_cutoff);
  EXPECT_GT(without2.report.tail_estimate, 0.0);
}

TEST(Kernels, ModeSumCapWarns) {
  const ProbeSetup s = build_setup(test::natural(2));
  TruncationPolicy p;
  p.max_mode = 3;
  p.tail_tol = 1e-16;
  const ModeSum m = mode_sum_offres(s, FieldPreparation{2, 0}, p);
  EXPECT_FALSE(m.report.converged);
  ASSERT_EQ(m.warnings.size(), 1u);
  EXPECT_GT(m.report.tail_estimate, 0.0);
}

TEST(Kernels, SecondOrderCollection) {
  const ProbeSetup s = build_setup(test::natural(2));
  const SecondOrderKernels k = second_order_kernels(s, FieldPreparation{2, 1}, TruncationPolicy{});
  ASSERT_GE(k.per_mode.size(), 2u);
  EXPECT_EQ(k.per_mode[1].minus, std::complex<double>(0.0, 0.0));
  EXPECT_EQ(k.per_mode[1].plus, c_closed(s, 2, Sign::plus));
}
