#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ambc/config.hpp"
#include "ambc/special.hpp"

using namespace ambc;

TEST(Config, DbConversions) {
  EXPECT_DOUBLE_EQ(db_to_linear(30.0), 1000.0);
  EXPECT_DOUBLE_EQ(db_to_linear(-20.0), 0.01);
  EXPECT_EQ(db_to_linear(-std::numeric_limits<double>::infinity()), 0.0);
  EXPECT_NEAR(linear_to_db(0.001), -30.0, 1e-12);
}

TEST(Config, IdaskRatioParsing) {
  EXPECT_EQ(IdaskRatio::parse("8/7"), IdaskRatio(8, 7));
  EXPECT_EQ(IdaskRatio::parse("16/14"), IdaskRatio(8, 7));
  EXPECT_EQ(IdaskRatio::parse("2"), IdaskRatio(2));
  EXPECT_EQ(IdaskRatio::parse("1.5"), IdaskRatio(3, 2));
  EXPECT_EQ(IdaskRatio::from_double(4.0 / 3.0), IdaskRatio(4, 3));
  EXPECT_EQ(IdaskRatio(8, 7).str(), "8/7");
  EXPECT_THROW(IdaskRatio::parse("x"), ConfigError);
  EXPECT_THROW(IdaskRatio::parse("0"), ConfigError);
  EXPECT_THROW(IdaskRatio(1, 0), ConfigError);
}

TEST(Config, EnergyFactorPeaksAtTwo) {
  EXPECT_DOUBLE_EQ(IdaskRatio(2).energy_factor(), 0.25);
  EXPECT_DOUBLE_EQ(IdaskRatio(1).energy_factor(), 0.0);
  // dense grid over (1, 2N]
  const double k2 = IdaskRatio(2).energy_factor();
  for (int i = 1; i <= 20000; ++i) {
    const double k = 1.0 + 199.0 * i / 20000.0;
    const double kk = 1.0 / k - 1.0 / (k * k);
    if (std::abs(k - 2.0) > 1e-12) EXPECT_LT(kk, k2) << k;
  }
}

TEST(Config, ReflectedLength) {
  SystemConfig cfg;
  cfg.n = 80;
  cfg.k = IdaskRatio(8, 7);
  EXPECT_EQ(cfg.reflected_length(), 140);
  EXPECT_EQ(cfg.reflect_start(), 20);
  cfg.k = IdaskRatio(3);
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, Validation) {
  SystemConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.m = 1;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ok;
  bad.k = IdaskRatio(1, 2);
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ok;
  bad.k = IdaskRatio(200);
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ok;
  bad.prior_c1 = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ok;
  bad.m_index = 6;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ok;
  bad.gamma_db = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ok;
  bad.gamma_db = -std::numeric_limits<double>::infinity();
  EXPECT_NO_THROW(bad.validate());
}

TEST(Config, ModulationTags) {
  EXPECT_EQ(parse_modulation("QAM16"), Modulation::Qam16);
  EXPECT_EQ(to_string(Modulation::Bpsk), "BPSK");
  EXPECT_THROW(parse_modulation("8PSK"), ConfigError);
}

TEST(Special, QFunction) {
  EXPECT_DOUBLE_EQ(q_function(0.0), 0.5);
  EXPECT_NEAR(q_function(2.0), 0.022750131948179, 1e-15);
  EXPECT_NEAR(q_function(-2.0), 1.0 - 0.022750131948179, 1e-15);
  EXPECT_NEAR(normal_cdf(-10.0), 7.61985302416e-24, 1e-34);
  EXPECT_NEAR(log_q_function(12.0), std::log(1.776482112077679e-33), 1e-6);
  EXPECT_NEAR(log_q_function(1.0), std::log(q_function(1.0)), 1e-12);
}
