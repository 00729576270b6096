#pragma once

#include <cmath>
#include <string_view>

#include <Eigen/Cholesky>

#include "ambc/covariance.hpp"
#include "ambc/errors.hpp"
#include "ambc/model.hpp"
#include "ambc/tracy_widom.hpp"

namespace ambc {

/// Which noise-variance formula fired: the H0 line uses all but lambda_1,
/// the H1 line also drops lambda_2.
enum class NoiseBranch { H0, H1 };

enum class NoiseEstimator {
  Modified,    // switches between the two lines on lambda_2 - lambda_m
  Unmodified,  // always the H1 line
};

inline std::string_view to_string(NoiseBranch b) { return b == NoiseBranch::H0 ? "H0" : "H1"; }

struct NoiseEstimate {
  double sigma2 = 0.0;
  NoiseBranch branch = NoiseBranch::H0;
};

struct DetectionOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  int decided_bit = 0;
  double noise_var_est = 0.0;
  NoiseBranch branch = NoiseBranch::H0;
};

inline NoiseEstimate estimate_noise_variance(const EigenSpectrum& spec, int m_index,
                                             NoiseEstimator estimator = NoiseEstimator::Modified) {
  const int m = spec.size();
  if (m < 3) throw ConfigError("noise-variance estimation needs M >= 3");
  const double rest = spec.trace - spec.lambda(1) - spec.lambda(2);
  const double h1_line = rest / (m - 2);
  if (estimator == NoiseEstimator::Unmodified) return {h1_line, NoiseBranch::H1};
  if (m_index < 3 || m_index > m) throw ConfigError("m_index must satisfy 3 <= m <= M");
  if (spec.lambda(2) - spec.lambda(m_index) < h1_line) {
    return {(spec.trace - spec.lambda(1)) / (m - 1), NoiseBranch::H0};
  }
  return {h1_line, NoiseBranch::H1};
}

/// lambda_2 / sigma_hat^2 with the blind noise estimate.
inline double se_statistic(const EigenSpectrum& spec, int m_index,
                           NoiseEstimator estimator = NoiseEstimator::Modified) {
  const auto est = estimate_noise_variance(spec, m_index, estimator);
  if (!(est.sigma2 > 0.0)) throw DegenerateInput("noise-variance estimate is not positive");
  return spec.lambda(2) / est.sigma2;
}

inline DetectionOutcome se_detect(const ReceivedFrame& frame, double eta, int m_index,
                                  NoiseEstimator estimator = NoiseEstimator::Modified) {
  const auto spec = eigen_spectrum(sample_covariance(frame));
  const auto est = estimate_noise_variance(spec, m_index, estimator);
  if (!(est.sigma2 > 0.0)) throw DegenerateInput("noise-variance estimate is not positive");
  DetectionOutcome out;
  out.statistic = spec.lambda(2) / est.sigma2;
  out.threshold = eta;
  out.decided_bit = out.statistic > eta ? 1 : 0;
  out.noise_var_est = est.sigma2;
  out.branch = est.branch;
  return out;
}

/// eta = mu + sigma * F_TW2^{-1}(1 - pfa).
inline double threshold_for_pfa(double pfa, int m, int n) {
  if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("pfa must lie in (0,1)");
  const auto c = centering_constants(m, n);
  return c.mu + c.sigma * tw2_quantile(1.0 - pfa);
}

/// Log-likelihood ratio of the reflected partition under the two genie
/// per-column covariances.
inline double glrt_statistic(const ReceivedFrame& frame, const TheoreticalCovariance& r0,
                             const TheoreticalCovariance& r1) {
  const Eigen::LLT<CMatrix> llt0(r0.r);
  const Eigen::LLT<CMatrix> llt1(r1.r);
  if (llt0.info() != Eigen::Success || llt1.info() != Eigen::Success) {
    throw DegenerateInput("GLRT covariance is not positive definite");
  }
  const CMatrix y1 = frame.y1();
  const CMatrix scatter = y1 * y1.adjoint();
  const CMatrix identity = CMatrix::Identity(r0.r.rows(), r0.r.cols());
  const CMatrix inv_diff = llt0.solve(identity) - llt1.solve(identity);
  const double quad = (inv_diff * scatter).trace().real();
  auto log_det = [](const Eigen::LLT<CMatrix>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
  };
  return quad + static_cast<double>(y1.cols()) * (log_det(llt0) - log_det(llt1));
}

inline int glrt_detect(const ReceivedFrame& frame, const TheoreticalCovariance& r0,
                       const TheoreticalCovariance& r1) {
  return glrt_statistic(frame, r0, r1) > 0.0 ? 1 : 0;
}

/// lambda_1 / sigma_hat^2. Simplified largest-eigenvalue baseline.
inline double le_statistic(const ReceivedFrame& frame, int m_index) {
  const auto spec = eigen_spectrum(sample_covariance(frame));
  const auto est = estimate_noise_variance(spec, m_index);
  if (!(est.sigma2 > 0.0)) throw DegenerateInput("noise-variance estimate is not positive");
  return spec.lambda(1) / est.sigma2;
}

inline int le_detect(const ReceivedFrame& frame, double eta_le, int m_index) {
  return le_statistic(frame, m_index) > eta_le ? 1 : 0;
}

/// Mean per-sample energy of Y1 over that of Y0. Simplified differential
/// energy baseline; needs k > 1 so that Y0 is not empty.
inline double energy_statistic(const ReceivedFrame& frame) {
  if (frame.reflect_start < 1 || frame.reflect_start >= frame.columns()) {
    throw ConfigError("energy detector needs both frame partitions to be non-empty (k > 1)");
  }
  const auto y0 = frame.y0();
  const auto y1 = frame.y1();
  const double e0 = y0.squaredNorm() / static_cast<double>(y0.size());
  const double e1 = y1.squaredNorm() / static_cast<double>(y1.size());
  if (!(e0 > 0.0)) throw DegenerateInput("energy detector: Y0 has zero energy");
  return e1 / e0;
}

inline int energy_detect(const ReceivedFrame& frame, double eta_e) {
  return energy_statistic(frame) > eta_e ? 1 : 0;
}

}  // namespace ambc
