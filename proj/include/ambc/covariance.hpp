#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "ambc/config.hpp"
#include "ambc/errors.hpp"
#include "ambc/model.hpp"
#include "ambc/types.hpp"

namespace ambc {

/// Real eigenvalues of a Hermitian matrix, largest first.
struct EigenSpectrum {
  std::vector<double> values;
  double trace = 0.0;

  [[nodiscard]] int size() const { return static_cast<int>(values.size()); }
  /// 1-based access, lambda(1) is the largest eigenvalue.
  [[nodiscard]] double lambda(int i) const { return values[static_cast<std::size_t>(i - 1)]; }
};

struct TheoreticalCovariance {
  CMatrix r;
  Hypothesis hypothesis = Hypothesis::H0;
};

/// R = Y Y^H / 2N, symmetrized.
template <class Derived>
CMatrix sample_covariance(const Eigen::MatrixBase<Derived>& y) {
  if (y.cols() < 1) throw ContractViolation("sample covariance needs at least one column");
  CMatrix lower = CMatrix::Zero(y.rows(), y.rows());
  lower.template selfadjointView<Eigen::Lower>().rankUpdate(y, 1.0 / static_cast<double>(y.cols()));
  CMatrix r = lower.template selfadjointView<Eigen::Lower>();
  r.diagonal() = r.diagonal().real().template cast<Complex>();
  return r;
}

inline CMatrix sample_covariance(const ReceivedFrame& frame) { return sample_covariance(frame.y); }

inline EigenSpectrum eigen_spectrum(const CMatrix& r) {
  if (r.rows() != r.cols()) throw ContractViolation("eigen_spectrum needs a square matrix");
  if (r.rows() < 2) throw ContractViolation("eigen_spectrum needs M >= 2");
  const double scale = r.norm();
  if ((r - r.adjoint()).norm() > 1e-8 * scale) {
    throw ContractViolation("eigen_spectrum input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(r, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  EigenSpectrum spec;
  const auto& ev = solver.eigenvalues();
  spec.values.assign(ev.data(), ev.data() + ev.size());
  std::reverse(spec.values.begin(), spec.values.end());
  spec.trace = r.trace().real();
  return spec;
}

/// Frame covariance under each hypothesis, mixing the reflected and
/// non-reflected partitions with weights 1/k and 1 - 1/k.
inline TheoreticalCovariance theoretical_covariance(const SystemConfig& cfg,
                                                    const ChannelRealization& ch,
                                                    Hypothesis hypothesis) {
  const double ss = cfg.signal_var();
  const double nn = cfg.noise_var();
  const CMatrix identity = CMatrix::Identity(cfg.m, cfg.m);
  if (hypothesis == Hypothesis::H0) {
    return {ss * ch.h1 * ch.h1.adjoint() + nn * identity, hypothesis};
  }
  const double inv_k = 1.0 / cfg.k.value();
  const CVector sum = ch.h1 + ch.h2;
  return {(1.0 - inv_k) * ss * ch.h1 * ch.h1.adjoint() + inv_k * ss * sum * sum.adjoint() +
              nn * identity,
          hypothesis};
}

/// Per-column covariance of the reflected partition Y1 (what a genie
/// likelihood test compares): sigma_s^2 h h^H + sigma_n^2 I with h = h1 under
/// H0 and h = h1 + h2 under H1.
inline TheoreticalCovariance column_covariance(const SystemConfig& cfg,
                                               const ChannelRealization& ch,
                                               Hypothesis hypothesis) {
  const CVector h = hypothesis == Hypothesis::H0 ? CVector(ch.h1) : CVector(ch.h1 + ch.h2);
  return {cfg.signal_var() * h * h.adjoint() +
              cfg.noise_var() * CMatrix::Identity(cfg.m, cfg.m),
          hypothesis};
}

struct DetDecomposition {
  double p1 = 0.0;
  double p2 = 0.0;
  double det_exact = 0.0;
};

/// Splits det(R1) into the dominant product P1 and the cross-term remainder
/// P2; det_exact comes from a pivoted LU factorization of the assembled R1.
inline DetDecomposition det_decomposition(const SystemConfig& cfg, const ChannelRealization& ch) {
  if (cfg.m < 2) throw ConfigError("det_decomposition needs M >= 2");
  const double ss = cfg.signal_var();
  const double nn = cfg.noise_var();
  const double k = cfg.k.value();
  const double kk = cfg.k.energy_factor();
  const double h1n = ch.h1.squaredNorm();
  const double h2n = ch.h2.squaredNorm();
  const Complex cross = ch.h1.dot(ch.h2);  // h1^H h2
  const double noise_m2 = std::pow(nn, cfg.m - 2);

  DetDecomposition out;
  out.p1 = (ss * h1n + nn) * (kk * ss * h2n + nn) * noise_m2;
  out.p2 = noise_m2 * (nn * ss * h2n / (k * k) + nn * ss * 2.0 * cross.real() / k -
                       (k - 1.0) * ss * ss * std::norm(cross) / (k * k));
  const auto r1 = theoretical_covariance(cfg, ch, Hypothesis::H1);
  out.det_exact = Eigen::PartialPivLU<CMatrix>(r1.r).determinant().real();
  return out;
}

/// Eigenvalues of R1 (or R0) predicted from the determinant factorization
/// when the cascaded link is weak.
inline std::vector<double> predicted_eigenvalues(const SystemConfig& cfg,
                                                 const ChannelRealization& ch,
                                                 Hypothesis hypothesis) {
  const double ss = cfg.signal_var();
  const double nn = cfg.noise_var();
  std::vector<double> out(static_cast<std::size_t>(cfg.m), nn);
  out[0] = ss * ch.h1.squaredNorm() + nn;
  if (hypothesis == Hypothesis::H1) {
    out[1] = ss * ch.h2.squaredNorm() * cfg.k.energy_factor() + nn;
  }
  return out;
}

}  // namespace ambc
