#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numeric>

#include "lfmimo/error.hpp"
#include "lfmimo/simulator.hpp"
#include "lfmimo/sinr.hpp"

namespace lfmimo {
namespace {

using cd = std::complex<double>;

// E[sin^2] of the best of 2^b isotropic codewords in C^M:
// 2^b Beta(2^b, M / (M - 1)).
double rvq_mean_error(int m, int b) {
  const double k = std::ldexp(1.0, b);
  const double a = static_cast<double>(m) / (m - 1);
  return k * std::exp(std::lgamma(k) + std::lgamma(a) - std::lgamma(k + a));
}

double sin2(const CVector& h, const CVector& c) { return 1.0 - std::norm(c.dot(h.normalized())); }

TEST(Substream, ReproducibleAndDistinct) {
  auto a = substream(42, 7);
  auto b = substream(42, 7);
  auto c = substream(42, 8);
  auto d = substream(43, 7);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(DrawChannels, MomentsOfUnitComplexGaussian) {
  Rng rng = substream(1, 0);
  const int draws = 25000;  // 4 x 4 entries each, 4e5 entries total
  double sum_re = 0.0;
  double sum_im = 0.0;
  double sum_sq = 0.0;
  double norm_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const CMatrix h = draw_channels(4, rng);
    for (Eigen::Index j = 0; j < h.size(); ++j) {
      sum_re += h(j).real();
      sum_im += h(j).imag();
      sum_sq += std::norm(h(j));
    }
    norm_sq += h.col(0).squaredNorm();
  }
  const double n = draws * 16.0;
  EXPECT_NEAR(sum_sq / n, 1.0, 0.02);
  EXPECT_NEAR(sum_re / n, 0.0, 0.01);
  EXPECT_NEAR(sum_im / n, 0.0, 0.01);
  EXPECT_NEAR(norm_sq / draws / 4.0, 1.0, 0.02);
}

TEST(Codebook, RejectsNonUnitWords) {
  CMatrix w(2, 2);
  w << cd(1, 0), cd(0, 0), cd(0, 0), cd(2, 0);
  EXPECT_THROW(Codebook{w}, ValidationError);
}

TEST(Codebook, SaveLoadRoundTrip) {
  Rng rng = substream(3, 0);
  const auto cb = Codebook::random(4, 5, rng);
  EXPECT_EQ(cb.size(), 32u);
  const auto path = std::filesystem::temp_directory_path() / "lfmimo_codebook_roundtrip.txt";
  cb.save(path.string());
  const auto back = Codebook::load(path.string());
  std::filesystem::remove(path);
  ASSERT_EQ(back.size(), cb.size());
  EXPECT_LT((back.words() - cb.words()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Quantize, AlignedCodewordWinsAndTiesGoLow) {
  Rng rng = substream(5, 0);
  const auto cb = Codebook::random(4, 4, rng);
  for (std::size_t j = 0; j < cb.size(); ++j) {
    const CVector h = cb.words().col(static_cast<Eigen::Index>(j)) * cd(0.0, 3.0);
    EXPECT_EQ(quantize(h, cb), j);
  }
  CMatrix dup(2, 2);
  dup.col(0) << cd(1, 0), cd(0, 0);
  dup.col(1) = dup.col(0) * cd(0, 1);
  CVector h(2);
  h << cd(0.6, 0), cd(0.8, 0);
  EXPECT_EQ(quantize(h, Codebook{dup}), 0u);
  EXPECT_THROW(quantize(CVector::Zero(2), Codebook{dup}), DegenerateError);
}

TEST(Quantize, SingleCodewordAlwaysIndexZero) {
  Rng rng = substream(6, 0);
  const auto cb = Codebook::random(4, 0, rng);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(quantize(draw_channels(4, rng).col(0), cb), 0u);
}

TEST(Quantize, MeanErrorFollowsRvqLaw) {
  Rng rng = substream(7, 0);
  const int trials = 20000;
  double explicit_err = 0.0;
  double sampled_err = 0.0;
  for (int i = 0; i < trials; ++i) {
    const CVector h = draw_channels(4, rng).col(0);
    const auto cb = Codebook::random(4, 6, rng);
    explicit_err += sin2(h, cb.words().col(static_cast<Eigen::Index>(quantize(h, cb))));
    sampled_err += sin2(h, sample_rvq_codeword(h, 6, rng));
  }
  const double expect = rvq_mean_error(4, 6);
  EXPECT_NEAR(explicit_err / trials / expect, 1.0, 0.02);
  EXPECT_NEAR(sampled_err / trials / expect, 1.0, 0.02);
  // Same order as the quantization factor 2^{-b/(N_t-1)}.
  EXPECT_NEAR(expect / std::exp2(-6.0 / 3.0), 0.8, 0.1);
}

TEST(SampleRvqCodeword, SineDistributionIsExact) {
  Rng rng = substream(8, 0);
  const int b = 10;
  std::vector<double> z;
  for (int i = 0; i < 20000; ++i) {
    const CVector h = draw_channels(4, rng).col(0);
    const CVector c = sample_rvq_codeword(h, b, rng);
    ASSERT_NEAR(c.norm(), 1.0, 1e-12);
    z.push_back(sin2(h, c));
  }
  const double k = std::ldexp(1.0, b);
  const double ks = ks_distance(z, [&](double x) { return x <= 0 ? 0.0 : -std::expm1(k * std::log1p(-x * x * x)); });
  EXPECT_LT(ks, 0.015);
}

TEST(ZfbfBeams, OrthogonalUnitBeams) {
  Rng rng = substream(9, 0);
  for (int i = 0; i < 200; ++i) {
    CMatrix q = draw_channels(4, rng);
    for (Eigen::Index k = 0; k < 4; ++k) q.col(k).normalize();
    const CMatrix w = zfbf_beams(q);
    for (Eigen::Index k = 0; k < 4; ++k) {
      ASSERT_NEAR(w.col(k).norm(), 1.0, 1e-12);
      for (Eigen::Index u = 0; u < 4; ++u) {
        if (u != k) ASSERT_LT(std::abs(q.col(u).dot(w.col(k))), 1e-10);
      }
    }
  }
}

TEST(ZfbfBeams, TwoAntennaOrthonormalCodewords) {
  CMatrix q(2, 2);
  const double s = std::sqrt(0.5);
  q.col(0) << cd(s, 0), cd(0, s);
  q.col(1) << cd(s, 0), cd(0, -s);
  const CMatrix w = zfbf_beams(q);
  for (Eigen::Index k = 0; k < 2; ++k) EXPECT_NEAR(std::abs(q.col(k).dot(w.col(k))), 1.0, 1e-12);
}

TEST(ZfbfBeams, DegenerateNullSpaceSteersAtOwnUser) {
  // Two users on three antennas: the null space of the other codeword has two dimensions.
  CMatrix r(3, 2);
  r.col(0) << cd(1, 0), cd(1, 0), cd(1, 0);
  r.col(0).normalize();
  r.col(1) << cd(0, 0), cd(1, 0), cd(0, 0);
  const CMatrix w = zfbf_beams(r);
  EXPECT_LT(std::abs(r.col(1).dot(w.col(0))), 1e-12);
  // Best beam in span{e1, e3} for (1,1,1)/sqrt3 is (1,0,1)/sqrt2.
  EXPECT_NEAR(std::abs(r.col(0).dot(w.col(0))), std::sqrt(2.0 / 3.0), 1e-12);
}

TEST(ZfbfBeams, IdenticalCodewordsAreDegenerate) {
  CMatrix q(2, 2);
  q.col(0) << cd(1, 0), cd(0, 0);
  q.col(1) = q.col(0);
  EXPECT_THROW(zfbf_beams(q), DegenerateError);
}

TEST(UserSinr, NoiselessLinkHasNoNoiseTerm) {
  CMatrix h = CMatrix::Identity(2, 2);
  h(1, 0) = 0.5;
  const CMatrix w = CMatrix::Identity(2, 2);
  EXPECT_DOUBLE_EQ(user_sinr(h, w, 0, std::numeric_limits<double>::infinity()), 1.0 / 0.25);
  EXPECT_DOUBLE_EQ(user_sinr(h, w, 0, 4.0), 1.0 / (0.25 + 0.25));
}

TEST(EmpiricalSinr, DeterministicGivenSeed) {
  LinkConfig cfg;
  cfg.b = 4;
  cfg.trials = 500;
  cfg.seed = 77;
  const auto a = empirical_sinr(cfg);
  const auto b = empirical_sinr(cfg);
  ASSERT_EQ(a.values, b.values);
  cfg.seed = 78;
  EXPECT_NE(empirical_sinr(cfg).values, a.values);
}

TEST(EmpiricalSinr, CloseToModelAtModerateTrials) {
  LinkConfig cfg;
  cfg.b = 6;
  cfg.gamma = 10.0;
  cfg.trials = 5000;
  const auto s = empirical_sinr(cfg);
  const auto p = SinrModelParams::from_gamma(4, 6, 10.0);
  EXPECT_LT(ks_distance(s.values, [&](double x) { return cdf_limited_feedback(p, x); }), 0.08);
}

TEST(EmpiricalSinr, FixedCodebookOfWrongDimensionRejected) {
  Rng rng = substream(1, 1);
  LinkConfig cfg;
  cfg.fixed_codebook = Codebook::random(3, 2, rng);
  EXPECT_THROW(empirical_sinr(cfg), ValidationError);
}

TEST(KsDistance, KnownSmallSample) {
  EXPECT_NEAR(ks_distance({0.5}, [](double x) { return x; }), 0.5, 1e-15);
  EXPECT_NEAR(ks_distance({0.25, 0.75}, [](double x) { return x; }), 0.25, 1e-15);
}

QueueSimConfig small_queue() {
  QueueSimConfig q;
  q.slot = 1.08e-3;
  q.horizon = 4000;
  q.traffic.lambda = 300;
  q.traffic.d_max = 0.002;
  q.link.b = 4;
  q.link.gamma = 100.0;
  q.link.seed = 5;
  return q;
}

TEST(SimulateQueue, EmptySystem) {
  auto q = small_queue();
  q.traffic.lambda = 0.0;
  const auto s = simulate_queue(q);
  EXPECT_EQ(s.dropped_fraction, 0.0);
  EXPECT_EQ(s.rho_hat_est, 0.0);
  EXPECT_EQ(s.arrivals, 0u);
}

TEST(SimulateQueue, NoServiceDropsEverything) {
  auto q = small_queue();
  q.forced_mode = 0;
  q.horizon = 20000;
  const auto s = simulate_queue(q);
  EXPECT_GT(s.dropped_fraction, 0.99);
  EXPECT_EQ(s.mode_histogram[0], 1.0);
}

TEST(SimulateQueue, ConservationAndFractions) {
  const auto s = simulate_queue(small_queue());
  EXPECT_EQ(s.arrivals, s.served + s.dropped + s.queued_at_end);
  EXPECT_GT(s.arrivals, 0u);
  EXPECT_NEAR(std::accumulate(s.mode_histogram.begin(), s.mode_histogram.end(), 0.0), 1.0, 1e-12);
  for (double f : s.mode_histogram) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
  EXPECT_GE(s.rho_hat_est, 0.0);
  EXPECT_LE(s.rho_hat_est, 1.0);
}

TEST(SimulateQueue, BitwiseReproducible) {
  const auto a = simulate_queue(small_queue());
  const auto b = simulate_queue(small_queue());
  EXPECT_EQ(a.dropped_fraction, b.dropped_fraction);
  EXPECT_EQ(a.rho_hat_est, b.rho_hat_est);
  EXPECT_EQ(a.mode_histogram, b.mode_histogram);
  EXPECT_EQ(a.redraws, b.redraws);
}

TEST(SimulateQueue, RhoHatGrowsWithLoad) {
  for (auto est : {RhoHatEstimator::slot_nonempty, RhoHatEstimator::arrival_sees_backlog}) {
    double prev = -1.0;
    for (double lambda : {50.0, 200.0, 400.0, 600.0, 800.0}) {
      auto q = small_queue();
      q.forced_mode = 1;  // one packet per slot
      q.horizon = 50000;
      q.estimator = est;
      q.traffic.lambda = lambda;
      const auto s = simulate_queue(q);
      EXPECT_GT(s.rho_hat_est, prev) << lambda;
      prev = s.rho_hat_est;
    }
  }
}

TEST(SimulateQueue, ValidatesInputs) {
  auto q = small_queue();
  q.forced_mode = 8;
  EXPECT_THROW(simulate_queue(q), ValidationError);
  q = small_queue();
  q.slot = 0.0;
  EXPECT_THROW(simulate_queue(q), ValidationError);
}

}  // namespace
}  // namespace lfmimo
