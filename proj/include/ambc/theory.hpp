#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ambc/config.hpp"
#include "ambc/errors.hpp"
#include "ambc/special.hpp"
#include "ambc/tracy_widom.hpp"

namespace ambc {

struct PerformancePoint {
  double gamma_db = 0.0;
  double pfa = 0.0;
  double pmd = 0.0;
  double ber = 0.0;
  double eta = 0.0;
};

/// Law of the effective backscatter SNR gamma_1 = |h2|^2 K gamma. With
/// per-entry channel variance delta_gamma, |h2|^2 is a sum of M exponentials,
/// so gamma_1 ~ Gamma(shape = M, scale = delta_gamma K gamma).
struct Gamma1Model {
  double shape = 1.0;
  double scale = 1.0;

  [[nodiscard]] double mean() const { return shape * scale; }
  [[nodiscard]] double stddev() const { return std::sqrt(shape) * scale; }
};

inline Gamma1Model gamma1_model(const SystemConfig& cfg) {
  const double scale = cfg.delta_gamma() * cfg.k.energy_factor() * cfg.gamma();
  if (!(scale > 0.0)) throw DomainError("gamma_1 model needs k > 1 and a non-zero backscatter link");
  return {static_cast<double>(cfg.m), scale};
}

inline double gamma1_pdf(const Gamma1Model& model, double x) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (model.shape > 1.0) return 0.0;
    if (model.shape == 1.0) return 1.0 / model.scale;
    return std::numeric_limits<double>::infinity();
  }
  const double log_pdf = (model.shape - 1.0) * std::log(x) - x / model.scale -
                         std::lgamma(model.shape) - model.shape * std::log(model.scale);
  return std::exp(log_pdf);
}

/// Probability of false alarm for threshold eta under the TW2 approximation.
inline double pfa_analytic(double eta, int m, int n) {
  const auto c = centering_constants(m, n);
  return tw2_sf((eta - c.mu) / c.sigma);
}

struct Lambda2Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian approximation of lambda_2 / sigma_n^2 under H1 for a given
/// effective backscatter SNR gamma_1.
inline Lambda2Moments h1_lambda2_distribution(int m, int n, double gamma1) {
  if (!(gamma1 > 0.0)) throw DomainError("gamma_1 must be positive");
  const double two_n = 2.0 * n;
  const double mean = (1.0 + gamma1) * (1.0 + (m - 2) / (two_n * gamma1));
  const double var = (1.0 + gamma1) * (1.0 + gamma1) / two_n;
  return {mean, var};
}

inline Lambda2Moments h1_lambda2_distribution(const SystemConfig& cfg, double gamma1) {
  return h1_lambda2_distribution(cfg.m, cfg.n, gamma1);
}

/// Missed-detection probability conditioned on gamma_1.
inline double pmd_conditional(double eta, double gamma1, int m, int n) {
  const auto d = h1_lambda2_distribution(m, n, gamma1);
  return 1.0 - q_function((eta - d.mean) / std::sqrt(d.variance));
}

/// Missed-detection probability averaged over an arbitrary gamma_1 law.
inline double pmd_average(double eta, int m, int n, const Gamma1Model& model) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double lo = std::max(0.0, model.mean() - 12.0 * model.stddev());
  const double hi = model.mean() + 12.0 * model.stddev();
  auto integrand = [&](double x) {
    if (!(x > 0.0)) return 0.0;
    return pmd_conditional(eta, x, m, n) * gamma1_pdf(model, x);
  };
  double error = 0.0;
  const double value = gk::integrate(integrand, lo, hi, 20, 1e-6, &error);
  if (!std::isfinite(value) || error > 1e-4) {
    throw NumericalError("pmd_average quadrature did not converge (estimate " +
                         std::to_string(value) + ", error " + std::to_string(error) + ")");
  }
  return std::clamp(value, 0.0, 1.0);
}

inline double pmd_average(double eta, const SystemConfig& cfg) {
  return pmd_average(eta, cfg.m, cfg.n, gamma1_model(cfg));
}

/// BER with equal priors: (P_fa + average P_md) / 2.
inline double ber_analytic(double eta, const SystemConfig& cfg) {
  if (cfg.prior_c1 != 0.5) throw ConfigError("analytic BER assumes prior_c1 = 0.5");
  return 0.5 * (pfa_analytic(eta, cfg.m, cfg.n) + pmd_average(eta, cfg));
}

/// High-SNR total-variation lower bound on the BER: (1 - Q(-sqrt(2N))) / 2.
inline double ber_lower_bound(int n) {
  if (n < 1) throw ConfigError("N must be >= 1");
  return 0.5 * q_function(std::sqrt(2.0 * n));
}

inline PerformancePoint performance_point(const SystemConfig& cfg, double eta) {
  PerformancePoint p;
  p.gamma_db = cfg.gamma_db;
  p.eta = eta;
  p.pfa = pfa_analytic(eta, cfg.m, cfg.n);
  p.pmd = pmd_average(eta, cfg);
  p.ber = 0.5 * (p.pfa + p.pmd);
  return p;
}

struct OvlResult {
  double ovl = 0.0;
  double bound = 0.0;
};

/// Overlap between the Gaussian law of the direct-link eigenvalue and the TW2
/// law of the noise-only eigenvalue for an (M-1)-antenna receiver, plus the
/// split-at-a upper bound.
inline OvlResult ovl_h0(double a, int m, int n, double gamma0) {
  if (!(a >= 0.0)) throw DomainError("a must be >= 0");
  if (!(gamma0 > 0.0)) throw DomainError("gamma_0 must be positive");
  const auto g = h1_lambda2_distribution(m, n, gamma0);
  const double sd0 = std::sqrt(g.variance);
  const auto c = centering_constants(m, n);
  auto p0 = [&](double x) {
    const double z = (x - g.mean) / sd0;
    return std::exp(-0.5 * z * z) / (sd0 * std::sqrt(2.0 * std::numbers::pi));
  };
  auto p1 = [&](double x) { return tw2_pdf((x - c.mu) / c.sigma) / c.sigma; };

  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  double error = 0.0;
  const double lo = c.mu - 12.0 * c.sigma;
  const double hi = c.mu + 10.0 * c.sigma;
  const double ovl = gk::integrate([&](double x) { return std::min(p0(x), p1(x)); }, lo, hi, 20,
                                   1e-9, &error);
  if (!std::isfinite(ovl)) throw NumericalError("OVL quadrature failed");

  OvlResult out;
  out.ovl = std::clamp(ovl, 0.0, 1.0);
  out.bound = (1.0 - tw2_cdf((a - c.mu) / c.sigma)) + normal_cdf((a - g.mean) / sd0);
  return out;
}

struct OvlH1Result {
  double exact = 0.0;       // full closed form
  double simplified = 0.0;  // weak-backscatter approximation
};

inline OvlH1Result ovl_h1(int m, int n, double gamma, double h1_norm2, double h2_norm2,
                          const IdaskRatio& k) {
  const double kk = k.energy_factor();
  if (!(kk > 0.0)) throw DomainError("ovl_h1 needs k > 1");
  if (!(gamma > 0.0 && h1_norm2 > 0.0 && h2_norm2 > 0.0)) throw DomainError("ovl_h1 needs positive inputs");
  const double root = std::sqrt(2.0 * n);
  const double lead = root * gamma - (m - 2) / (root * gamma * h1_norm2 * kk * h2_norm2);
  const double arg = lead * std::abs(h1_norm2 - kk * h2_norm2) /
                     ((h1_norm2 + kk * h2_norm2) * gamma + 2.0);
  OvlH1Result out;
  out.exact = q_function(arg);
  out.simplified = q_function(root * gamma / (gamma + 2.0 / h1_norm2));
  return out;
}

}  // namespace ambc
