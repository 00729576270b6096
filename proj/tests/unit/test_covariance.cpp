#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "ambc/covariance.hpp"
#include "ambc/rng.hpp"

using namespace ambc;

namespace {

CMatrix random_matrix(int rows, int cols, std::uint64_t seed) {
  auto rng = derive_stream(seed, 0);
  CMatrix y(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) y(r, c) = complex_normal(rng, 1.0);
  }
  return y;
}

SystemConfig config(int m) {
  SystemConfig cfg;
  cfg.m = m;
  cfg.m_index = std::min(3, m);
  return cfg;
}

}  // namespace

TEST(Covariance, ZeroInput) {
  const CMatrix y = CMatrix::Zero(4, 10);
  EXPECT_EQ(sample_covariance(y), CMatrix::Zero(4, 4));
}

TEST(Covariance, SingleColumnIsOuterProduct) {
  const CMatrix y = random_matrix(4, 1, 1);
  const CMatrix expect = y.col(0) * y.col(0).adjoint();
  EXPECT_LT((sample_covariance(y) - expect).norm(), 1e-14);
}

TEST(Covariance, TraceEqualsMeanColumnEnergy) {
  const CMatrix y = random_matrix(6, 37, 2);
  const auto r = sample_covariance(y);
  const double expect = y.squaredNorm() / 37.0;
  EXPECT_NEAR(r.trace().real(), expect, 1e-10 * expect);
  EXPECT_EQ((r - r.adjoint()).norm(), 0.0);
}

TEST(Covariance, ScaledIdentitySpectrum) {
  const auto spec = eigen_spectrum(2.5 * CMatrix::Identity(5, 5));
  for (double v : spec.values) EXPECT_NEAR(v, 2.5, 1e-13);
}

TEST(Covariance, RankOneSpectrum) {
  const auto cfg = config(5);
  auto rng = derive_stream(3, 0);
  const auto ch = generate_channels(cfg, rng);
  const auto r0 = theoretical_covariance(cfg, ch, Hypothesis::H0);
  const auto spec = eigen_spectrum(r0.r);
  const double nn = cfg.noise_var();
  EXPECT_NEAR(spec.lambda(1), cfg.signal_var() * ch.h1.squaredNorm() + nn, 1e-10 * spec.lambda(1));
  for (int i = 2; i <= 5; ++i) EXPECT_NEAR(spec.lambda(i), nn, 1e-8 * nn);
}

TEST(Covariance, EigenvalueSumEqualsTrace) {
  const CMatrix a = random_matrix(6, 6, 4);
  const CMatrix h = a + a.adjoint();
  const auto spec = eigen_spectrum(h);
  double sum = 0.0;
  for (double v : spec.values) sum += v;
  const double tr = h.trace().real();
  EXPECT_NEAR(sum, tr, 1e-9 * std::max(1.0, std::abs(tr)));
  for (int i = 1; i < spec.size(); ++i) EXPECT_GE(spec.lambda(i), spec.lambda(i + 1));
}

TEST(Covariance, EigenResidual) {
  const CMatrix a = random_matrix(5, 5, 5);
  const CMatrix h = a * a.adjoint();
  const auto spec = eigen_spectrum(h);
  for (double v : spec.values) {
    const double det = (h - v * CMatrix::Identity(5, 5)).determinant().real();
    EXPECT_LT(std::abs(det), 1e-8 * std::pow(h.norm(), 5));
  }
}

TEST(Covariance, RejectsNonHermitian) {
  CMatrix a = CMatrix::Identity(3, 3);
  a(0, 1) = Complex{1.0, 0.0};
  EXPECT_THROW(eigen_spectrum(a), ContractViolation);
  EXPECT_THROW(eigen_spectrum(CMatrix::Identity(1, 1)), ContractViolation);
}

TEST(Covariance, TheoreticalSpecialCases) {
  auto cfg = config(4);
  auto rng = derive_stream(6, 0);
  auto ch = generate_channels(cfg, rng);
  const auto r0 = theoretical_covariance(cfg, ch, Hypothesis::H0);
  auto no_bs = ch;
  no_bs.h2.setZero();
  EXPECT_LT((theoretical_covariance(cfg, no_bs, Hypothesis::H1).r - r0.r).norm(), 1e-15 * r0.r.norm());

  cfg.k = IdaskRatio(1);
  const CVector h = ch.h1 + ch.h2;
  const CMatrix ook = cfg.signal_var() * h * h.adjoint() + cfg.noise_var() * CMatrix::Identity(4, 4);
  EXPECT_LT((theoretical_covariance(cfg, ch, Hypothesis::H1).r - ook).norm(), 1e-12 * ook.norm());
}

TEST(Covariance, TheoreticalMatchesMonteCarlo) {
  auto cfg = config(4);
  cfg.n = 500;
  cfg.gamma_db = 10.0;
  cfg.delta_gamma_db = -3.0;
  cfg.noise_var_dbm = 0.0;
  auto rng = derive_stream(7, 0);
  const auto ch = generate_channels(cfg, rng);
  for (auto hyp : {Hypothesis::H0, Hypothesis::H1}) {
    CMatrix acc = CMatrix::Zero(4, 4);
    const int frames = 1000;  // 1e6 columns
    for (int f = 0; f < frames; ++f) {
      acc += sample_covariance(synthesize_frame(cfg, ch, hyp == Hypothesis::H1 ? 1 : 0, rng));
    }
    acc /= frames;
    const auto r = theoretical_covariance(cfg, ch, hyp).r;
    EXPECT_LT((acc - r).norm() / r.norm(), 0.01);
  }
}

TEST(Covariance, DeterminantIdentityWithoutBackscatter) {
  auto cfg = config(5);
  auto rng = derive_stream(8, 0);
  auto ch = generate_channels(cfg, rng);
  ch.h2.setZero();
  const auto d = det_decomposition(cfg, ch);
  EXPECT_EQ(d.p2, 0.0);
  const double nn = cfg.noise_var();
  const double expect = (cfg.signal_var() * ch.h1.squaredNorm() + nn) * std::pow(nn, 4);
  EXPECT_NEAR(d.det_exact, expect, 1e-9 * expect);
  EXPECT_NEAR(d.p1, expect, 1e-12 * expect);
}

TEST(Covariance, DeterminantIdentityRandom) {
  std::mt19937_64 pick(99);
  std::uniform_int_distribution<int> m_dist(2, 8);
  std::uniform_real_distribution<double> gamma_dist(0.0, 40.0);
  std::uniform_real_distribution<double> dg_dist(-40.0, 0.0);
  const IdaskRatio ks[] = {IdaskRatio(1), IdaskRatio(4, 3), IdaskRatio(2), IdaskRatio(4), IdaskRatio(10)};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto cfg = config(m_dist(pick));
    cfg.n = 60;
    cfg.gamma_db = gamma_dist(pick);
    cfg.delta_gamma_db = dg_dist(pick);
    cfg.k = ks[i % 5];
    auto rng = derive_stream(100, static_cast<std::uint64_t>(i));
    const auto ch = generate_channels(cfg, rng);
    const auto d = det_decomposition(cfg, ch);
    worst = std::max(worst, std::abs(d.p1 + d.p2 - d.det_exact) / d.det_exact);
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Covariance, CrossTermSmallForWeakBackscatter) {
  auto cfg = config(5);
  cfg.gamma_db = 30.0;
  cfg.delta_gamma_db = -40.0;
  double ratio = 0.0;
  for (int i = 0; i < 1000; ++i) {
    auto rng = derive_stream(200, static_cast<std::uint64_t>(i));
    const auto d = det_decomposition(cfg, generate_channels(cfg, rng));
    ratio += std::abs(d.p2) / d.p1;
  }
  EXPECT_LT(ratio / 1000.0, 1e-2);
}

TEST(Covariance, PredictedEigenvalues) {
  auto cfg = config(5);
  auto rng = derive_stream(9, 0);
  const auto ch = generate_channels(cfg, rng);
  const double nn = cfg.noise_var();
  const auto h1 = predicted_eigenvalues(cfg, ch, Hypothesis::H1);
  EXPECT_DOUBLE_EQ(h1[1], cfg.signal_var() * ch.h2.squaredNorm() / 4.0 + nn);
  const auto h0 = predicted_eigenvalues(cfg, ch, Hypothesis::H0);
  for (int i = 1; i < 5; ++i) EXPECT_EQ(h0[static_cast<std::size_t>(i)], nn);
  cfg.k = IdaskRatio(1);
  EXPECT_DOUBLE_EQ(predicted_eigenvalues(cfg, ch, Hypothesis::H1)[1], nn);
}

TEST(Covariance, PredictedEigenvaluesMatchExactSolve) {
  // Entry 2 follows the part of h2 orthogonal to h1 to first order; on
  // average over draws the prediction is within 5% once the exact second
  // eigenvalue is compared against |h2_perp|^2.
  auto cfg = config(5);
  cfg.gamma_db = 40.0;
  cfg.delta_gamma_db = -30.0;
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    auto rng = derive_stream(300, static_cast<std::uint64_t>(i));
    auto ch = generate_channels(cfg, rng);
    const auto exact = eigen_spectrum(theoretical_covariance(cfg, ch, Hypothesis::H1).r);
    const auto pred = predicted_eigenvalues(cfg, ch, Hypothesis::H1);
    EXPECT_NEAR(exact.lambda(1), pred[0], 0.05 * pred[0]);
    for (int j = 3; j <= 5; ++j) EXPECT_NEAR(exact.lambda(j), pred[static_cast<std::size_t>(j - 1)], 0.05 * pred[2]);
    const CVector perp = ch.h2 - ch.h1 * (ch.h1.dot(ch.h2) / ch.h1.squaredNorm());
    auto ortho = ch;
    ortho.h2 = perp;
    const auto pred_perp = predicted_eigenvalues(cfg, ortho, Hypothesis::H1);
    EXPECT_NEAR(exact.lambda(2), pred_perp[1], 0.05 * pred_perp[1]);
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

TEST(Covariance, NoiseFloorEigenvaluesUnderH0) {
  for (int m : {3, 5, 8}) {
    auto cfg = config(m);
    auto rng = derive_stream(10, static_cast<std::uint64_t>(m));
    const auto spec = eigen_spectrum(theoretical_covariance(cfg, generate_channels(cfg, rng), Hypothesis::H0).r);
    for (int i = 2; i <= m; ++i) EXPECT_NEAR(spec.lambda(i), cfg.noise_var(), 1e-8 * cfg.noise_var());
  }
}
