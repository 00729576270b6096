#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/distributions/gamma.hpp>

#include "ambc/detectors.hpp"
#include "ambc/theory.hpp"
#include "oracles.hpp"

using namespace ambc;

namespace {

SystemConfig roc_gamma30() {
  SystemConfig cfg;
  cfg.m = 5;
  cfg.n = 50;
  cfg.gamma_db = 30.0;
  cfg.delta_gamma_db = -30.0;
  cfg.k = IdaskRatio(2);
  return cfg;
}

}  // namespace

TEST(Theory, PfaAtCenter) {
  const auto c = centering_constants(5, 50);
  EXPECT_NEAR(pfa_analytic(c.mu, 5, 50), 1.0 - tw2_cdf(0.0), 1e-15);
}

TEST(Theory, PfaThresholdRoundTrip) {
  for (int m : {3, 5, 20}) {
    for (int n : {10, 50, 300}) {
      for (double p = 1e-4; p < 1.0 - 1e-4; p = p < 0.5 ? p * 1.7 : 1.0 - (1.0 - p) / 1.7) {
        EXPECT_NEAR(pfa_analytic(threshold_for_pfa(p, m, n), m, n), p, 1e-6);
      }
    }
  }
}

TEST(Theory, PfaSurfaceFallsWithNAndEta) {
  for (int m = 5; m <= 30; m += 5) {
    for (int n = 50; n < 300; n += 50) {
      EXPECT_GT(pfa_analytic(1.5524, m, n), pfa_analytic(1.5524, m, n + 50));
      EXPECT_GT(pfa_analytic(1.5524, m, n), pfa_analytic(1.962, m, n));
    }
  }
}

TEST(Theory, PmdConditionalLimits) {
  // gamma_1 -> inf: argument -> -sqrt(2N)
  EXPECT_NEAR(pmd_conditional(1.5, 1e9, 5, 50), 1.0 - q_function(-10.0), 1e-12);
  const auto d = h1_lambda2_distribution(5, 50, 3.0);
  EXPECT_NEAR(pmd_conditional(d.mean, 3.0, 5, 50), 0.5, 1e-14);
  EXPECT_THROW(pmd_conditional(1.5, 0.0, 5, 50), DomainError);
}

TEST(Theory, PmdConditionalDecreasingInGamma1) {
  for (double eta = 1.2; eta <= 3.0; eta += 0.1) {
    double prev = 1.0 + 1e-12;
    for (double g = 0.5; g <= 100.0; g *= 1.1) {
      const double p = pmd_conditional(eta, g, 5, 50);
      EXPECT_LE(p, prev) << eta << " " << g;
      prev = p;
    }
  }
}

TEST(Theory, Lambda2Moments) {
  const auto d = h1_lambda2_distribution(2, 50, 1.0);
  EXPECT_DOUBLE_EQ(d.mean, 2.0);
  EXPECT_DOUBLE_EQ(d.variance, 2.0 / 50.0);
  EXPECT_LT(h1_lambda2_distribution(5, 5000000, 8.0).variance, 1e-4);
}

TEST(Theory, Gamma1Density) {
  const Gamma1Model model{5.0, 0.01 * 0.25 * 1000.0};
  EXPECT_NEAR(model.mean(), 5.0 * 2.5, 1e-12);
  const Gamma1Model expo{1.0, 2.0};
  for (double x : {0.0, 0.5, 3.0}) EXPECT_NEAR(gamma1_pdf(expo, x), 0.5 * std::exp(-x / 2.0), 1e-15);
  EXPECT_EQ(gamma1_pdf(model, -1.0), 0.0);
  boost::math::gamma_distribution<double> ref(5.0, 2.5);
  for (double x : {0.1, 1.0, 10.0, 40.0}) EXPECT_NEAR(gamma1_pdf(model, x), boost::math::pdf(ref, x), 1e-14);
}

TEST(Theory, Gamma1DensityMatchesChannelDraws) {
  SystemConfig cfg;
  cfg.m = 5;
  cfg.gamma_db = 30.0;
  cfg.delta_gamma_db = -20.0;
  const auto model = gamma1_model(cfg);
  EXPECT_NEAR(model.scale, 0.01 * 0.25 * 1000.0, 1e-12);
  std::vector<double> draws;
  for (int i = 0; i < 100000; ++i) {
    auto rng = derive_stream(31, static_cast<std::uint64_t>(i));
    draws.push_back(generate_channels(cfg, rng).h2.squaredNorm() * cfg.k.energy_factor() * cfg.gamma());
  }
  boost::math::gamma_distribution<double> ref(model.shape, model.scale);
  // density integrates to the reference CDF, so the KS distance uses it
  EXPECT_LE(oracle::ks_distance(draws, [&](double x) { return boost::math::cdf(ref, x); }), 0.01);
}

TEST(Theory, PmdAverageSifting) {
  // shrinking scale at fixed mean concentrates the law on the mean
  const double mean = 6.0;
  const double eta = 1.5;
  const Gamma1Model narrow{1e6, mean / 1e6};
  EXPECT_NEAR(pmd_average(eta, 5, 50, narrow), pmd_conditional(eta, mean, 5, 50), 1e-4);
  const double eta2 = h1_lambda2_distribution(5, 50, mean).mean;
  EXPECT_NEAR(pmd_average(eta2, 5, 50, narrow), 0.5, 1e-3);
}

TEST(Theory, PmdAverageAgainstGammaSampling) {
  const auto cfg = roc_gamma30();
  const auto model = gamma1_model(cfg);
  std::mt19937_64 rng(5);
  std::gamma_distribution<double> gamma(model.shape, model.scale);
  for (double pfa : {1e-1, 1e-2}) {
    const double eta = threshold_for_pfa(pfa, cfg.m, cfg.n);
    double acc = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) acc += pmd_conditional(eta, gamma(rng), cfg.m, cfg.n);
    EXPECT_NEAR(pmd_average(eta, cfg), acc / draws, 1e-3);
  }
}

TEST(Theory, PmdAverageDecreasingInGamma) {
  auto cfg = roc_gamma30();
  const double eta = threshold_for_pfa(0.01, 5, 50);
  double prev = 1.0;
  for (double g = 25.0; g <= 45.0; g += 2.5) {
    cfg.gamma_db = g;
    const double p = pmd_average(eta, cfg);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Theory, PmdAverageMinimalAtKEqualsTwo) {
  SystemConfig cfg;
  cfg.m = 5;
  cfg.n = 80;
  cfg.gamma_db = 35.0;
  cfg.delta_gamma_db = -30.0;
  const double eta = threshold_for_pfa(0.01, 5, 80);
  cfg.k = IdaskRatio(2);
  const double best = pmd_average(eta, cfg);
  for (auto k : {IdaskRatio(8, 7), IdaskRatio(4, 3), IdaskRatio(4), IdaskRatio(8), IdaskRatio(16)}) {
    cfg.k = k;
    EXPECT_GT(pmd_average(eta, cfg), best) << k.str();
  }
}

TEST(Theory, PmdAverageNeedsBackscatter) {
  auto cfg = roc_gamma30();
  cfg.k = IdaskRatio(1);
  EXPECT_THROW(pmd_average(1.5, cfg), DomainError);
}

TEST(Theory, BerLimits) {
  const auto cfg = roc_gamma30();
  EXPECT_NEAR(ber_analytic(50.0, cfg), 0.5, 1e-9);
  EXPECT_NEAR(ber_analytic(-50.0, cfg), 0.5, 1e-9);
  auto unequal = cfg;
  unequal.prior_c1 = 0.3;
  EXPECT_THROW(ber_analytic(1.5, unequal), ConfigError);
}

TEST(Theory, BerApproachesHalfPfaAtHighSnr) {
  SystemConfig cfg;
  cfg.gamma_db = 50.0;
  cfg.delta_gamma_db = -20.0;
  for (int m : {10, 20, 40}) {
    cfg.m = m;
    cfg.n = 10 * m;
    const double eta = threshold_for_pfa(0.01, m, cfg.n);
    EXPECT_NEAR(ber_analytic(eta, cfg), 0.005, 0.005 * 0.01) << m;
  }
}

TEST(Theory, BerLowerBound) {
  EXPECT_NEAR(ber_lower_bound(50), 0.5 * oracle::phi(-10.0), 1e-36);
  EXPECT_NEAR(ber_lower_bound(50), 3.8e-24, 0.05e-24);
  EXPECT_NEAR(ber_lower_bound(2), 0.5 * oracle::phi(-2.0), 1e-15);
  EXPECT_NEAR(ber_lower_bound(2), 0.01138, 1e-5);
  EXPECT_LT(ber_lower_bound(500), 1e-200);
}

TEST(Theory, OvlH0) {
  const auto strong = ovl_h0(5.0, 5, 5000, 1e6);
  EXPECT_LT(strong.ovl, 1e-6);
  const auto r = ovl_h0(5.0, 5, 50, 1e4);
  EXPECT_LE(r.bound, 1e-3);
  for (double a : {1.2, 1.5, 2.0, 5.0}) {
    for (double g0 : {1.0, 3.0, 10.0, 100.0}) {
      const auto o = ovl_h0(a, 5, 50, g0);
      EXPECT_LE(o.ovl, o.bound + 1e-9) << a << " " << g0;
    }
  }
  EXPECT_THROW(ovl_h0(-1.0, 5, 50, 10.0), DomainError);
}

TEST(Theory, OvlH1) {
  const double gamma = db_to_linear(35.0);
  const double h1 = 5.0;
  const double h2 = 5.0 * db_to_linear(-30.0);
  const auto o = ovl_h1(5, 50, gamma, h1, h2, IdaskRatio(2));
  EXPECT_LE(std::abs(o.exact - o.simplified), 0.05);
  const auto far = ovl_h1(5, 5000000, gamma, h1, h2, IdaskRatio(2));
  EXPECT_LT(far.exact, 1e-12);
  EXPECT_LT(far.simplified, 1e-12);
  // K |h2|^2 = |h1|^2 zeroes the argument
  const auto tie = ovl_h1(5, 50, gamma, 1.0, 4.0, IdaskRatio(2));
  EXPECT_DOUBLE_EQ(tie.exact, 0.5);
}
