#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "lfmimo/error.hpp"
#include "lfmimo/traffic.hpp"
#include "oracle/oracle.hpp"

namespace lfmimo {
namespace {

TrafficSpec random_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TrafficSpec s;
  s.lambda = std::exp(std::log(1.0) + u(rng) * std::log(1e4));
  s.packet_bits = std::uniform_int_distribution<std::int64_t>(64, 12000)(rng);
  s.d_max = 1e-4 * std::pow(1e3, u(rng));
  s.rho_hat = 0.05 + 0.95 * u(rng);
  s.epsilon0 = s.rho_hat * std::pow(10.0, -1.0 - 5.0 * u(rng));
  return s;
}

TEST(EffectiveBandwidth, FrozenReferenceValue) {
  // mpmath, 40 digits: (300 / 1e-4) (e^{0.108} - 1).
  EXPECT_NEAR(effective_bandwidth(TrafficSpec{}, 1e-4), 342143.2361594028, 342143.2361594028 * 1e-12);
}

TEST(EffectiveBandwidth, SeriesBranchIsAccurate) {
  const TrafficSpec spec;
  const double nb = 1080.0;
  for (double x : {1e-12, 1e-9, 0.999e-6, 1.001e-6, 1e-3}) {
    const long double xl = x;
    const auto expect = static_cast<double>(300.0L * 1080.0L * std::expm1(xl) / xl);
    EXPECT_NEAR(effective_bandwidth(spec, x / nb) / expect, 1.0, 1e-14) << x;
  }
  EXPECT_NEAR(effective_bandwidth(spec, 1e-15), spec.mean_load(), spec.mean_load() * 1e-12);
}

TEST(EffectiveBandwidth, RejectsNonPositiveAndOverflowingS) {
  const TrafficSpec spec;
  EXPECT_THROW(effective_bandwidth(spec, 0.0), std::domain_error);
  EXPECT_THROW(effective_bandwidth(spec, -1.0), std::domain_error);
  EXPECT_THROW(effective_bandwidth(spec, 710.0 / 1080.0), std::domain_error);
}

TEST(EffectiveBandwidth, IncreasingInSAboveMeanLoad) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto spec = random_spec(rng);
    const double nb = static_cast<double>(spec.packet_bits);
    double prev = spec.mean_load();
    for (double x = 1e-8; x < 600.0; x *= 3.0) {
      const double a = effective_bandwidth(spec, x / nb);
      ASSERT_GE(a, prev * (1.0 - 1e-15));
      prev = a;
    }
  }
}

TEST(QosExponent, UnstableAtOrBelowMeanLoad) {
  const TrafficSpec spec;
  const auto q = qos_exponent(spec, spec.mean_load());
  EXPECT_FALSE(q.stable);
  EXPECT_EQ(q.s_star, 0.0);
  EXPECT_FALSE(qos_exponent(spec, 0.0).stable);
  EXPECT_THROW(qos_exponent(spec, -1.0), std::domain_error);
}

TEST(QosExponent, InvertsFrozenEffectiveBandwidth) {
  const auto q = qos_exponent(TrafficSpec{}, 342143.2361594028);
  EXPECT_TRUE(q.stable);
  EXPECT_NEAR(q.s_star, 1e-4, 1e-4 * 1e-9);
}

TEST(QosExponent, RoundTripOnRandomSpecs) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto spec = random_spec(rng);
    const double c = spec.mean_load() * (1.0 + std::pow(10.0, -4.0 + 6.0 * u(rng)));
    const auto q = qos_exponent(spec, c);
    ASSERT_TRUE(q.stable);
    ASSERT_NEAR(effective_bandwidth(spec, q.s_star) / c, 1.0, 1e-8) << "instance " << i;
  }
}

TEST(ViolationProbability, SaturatesAtRhoHatWhenUnstable) {
  TrafficSpec spec;
  spec.rho_hat = 0.3;
  EXPECT_DOUBLE_EQ(violation_probability(spec, 0.5 * spec.mean_load()), 0.3);
  EXPECT_DOUBLE_EQ(violation_probability(spec, spec.mean_load()), 0.3);
}

TEST(ViolationProbability, NonIncreasingInRate) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto spec = random_spec(rng);
    double prev = spec.rho_hat;
    for (double f = 0.5; f < 50.0; f *= 1.07) {
      const double p = violation_probability(spec, f * spec.mean_load());
      ASSERT_LE(p, prev * (1.0 + 1e-12));
      ASSERT_GE(p, 0.0);
      prev = p;
    }
  }
}

TEST(MinServeRate, MatchesClosedFormOracle) {
  EXPECT_NEAR(min_serve_rate(TrafficSpec{}), 1151037.8144034571, 1151037.8144034571 * 1e-8);
  TrafficSpec high;
  high.lambda = 3000;
  EXPECT_NEAR(min_serve_rate(high), 4365993.261820653, 4365993.261820653 * 1e-8);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto spec = random_spec(rng);
    const double expect = oracle::cmin_closed_form(spec.lambda, static_cast<double>(spec.packet_bits),
                                                   spec.d_max, spec.epsilon0, spec.rho_hat);
    ASSERT_NEAR(min_serve_rate(spec) / expect, 1.0, 1e-8) << "instance " << i;
  }
}

TEST(MinServeRate, HitsTargetViolation) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    const auto spec = random_spec(rng);
    const double c = min_serve_rate(spec);
    EXPECT_GT(c, spec.mean_load());
    ASSERT_NEAR(violation_probability(spec, c) / spec.epsilon0, 1.0, 1e-6);
  }
}

TEST(MinServeRate, DecreasesWithDelayBound) {
  TrafficSpec spec;
  double prev = min_serve_rate(spec);
  for (double d : {0.004, 0.008, 0.012, 0.05}) {
    spec.d_max = d;
    const double c = min_serve_rate(spec);
    EXPECT_LT(c, prev);
    prev = c;
  }
}

TEST(MinServeRate, ValidatesInputs) {
  TrafficSpec spec;
  spec.d_max = 0.0;
  try {
    min_serve_rate(spec);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "d_max");
  }
  spec = TrafficSpec{};
  spec.epsilon0 = 1.0;
  EXPECT_THROW(min_serve_rate(spec), ValidationError);
  spec = TrafficSpec{};
  spec.rho_hat = 0.005;
  EXPECT_THROW(min_serve_rate(spec), ValidationError);
  spec = TrafficSpec{};
  spec.packet_bits = 0;
  EXPECT_THROW(min_serve_rate(spec), ValidationError);
  spec = TrafficSpec{};
  spec.lambda = -3;
  EXPECT_THROW(min_serve_rate(spec), ValidationError);
}

TEST(Theorem1Approx, FrozenReferenceValue) {
  EXPECT_NEAR(theorem1_approx(TrafficSpec{}), 1567395.9502167846, 1e-6);
}

TEST(Theorem1Approx, GapBetweenDelayBoundsIsAffineInLambda) {
  TrafficSpec a;
  TrafficSpec b;
  b.d_max = 0.008;
  a.lambda = 1000;
  b.lambda = 1000;
  const double gap0 = theorem1_approx(a) - theorem1_approx(b);
  for (double lambda : {1500.0, 3000.0, 5000.0}) {
    a.lambda = lambda;
    b.lambda = lambda;
    EXPECT_NEAR(theorem1_approx(a) - theorem1_approx(b), gap0, 1e-6 * gap0);
  }
}

}  // namespace
}  // namespace lfmimo
