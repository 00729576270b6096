#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>
#include <boost/math/special_functions/fpclassify.hpp>  // pchip.hpp needs isnan in scope
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>

#include "ambc/errors.hpp"

namespace ambc {

namespace detail {

/// Gauss-Legendre nodes and weights on [lo, hi].
template <int Nodes>
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(double lo, double hi) {
  using rule = boost::math::quadrature::gauss<double, Nodes>;
  const auto& abscissa = rule::abscissa();
  const auto& weights = rule::weights();
  std::vector<double> x;
  std::vector<double> w;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    if (abscissa[i] == 0.0) {
      x.push_back(mid);
      w.push_back(half * weights[i]);
      continue;
    }
    x.push_back(mid - half * abscissa[i]);
    w.push_back(half * weights[i]);
    x.push_back(mid + half * abscissa[i]);
    w.push_back(half * weights[i]);
  }
  return {x, w};
}

}  // namespace detail

/// F_TW2(s) = det(I - K_Airy) on L^2(s, inf), discretized by Gauss-Legendre
/// quadrature on [s, upper]. The Airy kernel is negligible beyond 16.
template <int Nodes = 64>
double tw2_fredholm_cdf(double s, double upper = 16.0) {
  if (s >= upper) return 1.0;
  const auto [x, w] = detail::gauss_legendre<Nodes>(s, upper);
  const auto n = static_cast<Eigen::Index>(x.size());
  std::vector<double> ai(x.size());
  std::vector<double> aip(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    ai[i] = boost::math::airy_ai(x[i]);
    aip[i] = boost::math::airy_ai_prime(x[i]);
  }
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      double kernel;
      if (i == j) {
        kernel = aip[ui] * aip[ui] - x[ui] * ai[ui] * ai[ui];
      } else {
        kernel = (ai[ui] * aip[uj] - aip[ui] * ai[uj]) / (x[ui] - x[uj]);
      }
      a(i, j) = (i == j ? 1.0 : 0.0) - std::sqrt(w[ui]) * kernel * std::sqrt(w[uj]);
    }
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
}

/// Tabulated TW2 CDF.
struct Tw2Table {
  std::vector<double> grid;
  std::vector<double> cdf;

  void write_csv(std::ostream& out) const {
    out << "s,cdf\n";
    char line[64];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", grid[i], cdf[i]);
      out << line;
    }
  }

  static Tw2Table read_csv(std::istream& in) {
    Tw2Table table;
    std::string line;
    if (!std::getline(in, line) || line != "s,cdf") throw ConfigError("TW2 table: bad header");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ConfigError("TW2 table: malformed row");
      table.grid.push_back(std::stod(line.substr(0, comma)));
      table.cdf.push_back(std::stod(line.substr(comma + 1)));
    }
    table.check();
    return table;
  }

  void check() const {
    if (grid.size() < 4 || grid.size() != cdf.size()) throw ConfigError("TW2 table: too short");
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (!(grid[i] > grid[i - 1]) || !(cdf[i] > cdf[i - 1])) {
        throw ConfigError("TW2 table: not strictly increasing");
      }
    }
    if (!(cdf.front() > 0.0) || !(cdf.back() < 1.0)) throw ConfigError("TW2 table: values outside (0,1)");
  }
};

/// Evaluates the Fredholm determinant on a uniform grid. Trailing points
/// where the CDF has saturated to 1 in double precision are dropped.
inline Tw2Table build_tw2_table(double lo = -9.0, double hi = 7.0, double step = 0.02) {
  Tw2Table table;
  const auto count = static_cast<int>(std::lround((hi - lo) / step));
  for (int i = 0; i <= count; ++i) {
    const double s = lo + step * i;
    const double f = tw2_fredholm_cdf(s);
    if (!table.cdf.empty() && !(f > table.cdf.back())) break;
    if (!(f < 1.0)) break;
    table.grid.push_back(s);
    table.cdf.push_back(f);
  }
  table.check();
  return table;
}

/// Monotone cubic (PCHIP) interpolation of a TW2 table, with the known tail
/// shapes beyond its ends: log F ~ -|s|^3/12 - (1/8) log|s| on the left and
/// 1 - F ~ exp(-4/3 s^{3/2}) s^{-3/2} on the right, matched to the table
/// endpoints so the CDF stays continuous and monotone.
class Tw2Distribution {
 public:
  explicit Tw2Distribution(Tw2Table table)
      : table_(std::move(table)),
        interp_(std::vector<double>(table_.grid), std::vector<double>(table_.cdf)) {
    table_.check();
    if (table_.grid.front() >= 0.0 || table_.grid.back() <= 0.0) {
      throw ConfigError("TW2 table must straddle 0");
    }
  }

  [[nodiscard]] const Tw2Table& table() const { return table_; }
  [[nodiscard]] double lo() const { return table_.grid.front(); }
  [[nodiscard]] double hi() const { return table_.grid.back(); }

  [[nodiscard]] double cdf(double s) const {
    if (std::isnan(s)) return s;
    if (s < lo()) return table_.cdf.front() * std::exp(left_log_ratio(s));
    if (s > hi()) return 1.0 - (1.0 - table_.cdf.back()) * std::exp(right_log_ratio(s));
    return std::clamp(interp_(s), 0.0, 1.0);
  }

  /// 1 - F(s), kept accurate in the right tail.
  [[nodiscard]] double sf(double s) const {
    if (s > hi()) return (1.0 - table_.cdf.back()) * std::exp(right_log_ratio(s));
    return 1.0 - cdf(s);
  }

  [[nodiscard]] double pdf(double s) const {
    if (s < lo()) {
      const double a = -s;
      return cdf(s) * (a * a / 4.0 + 1.0 / (8.0 * a));
    }
    if (s > hi()) {
      return (1.0 - cdf(s)) * (2.0 * std::sqrt(s) + 1.5 / s);
    }
    return std::max(0.0, interp_.prime(s));
  }

  [[nodiscard]] double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("TW2 quantile needs p in (0,1)");
    double left = -10.0;
    double right = 8.0;
    while (cdf(left) > p) left *= 2.0;
    while (cdf(right) < p) right += 2.0;
    for (int iter = 0; iter < 200 && right - left > 1e-14; ++iter) {
      const double mid = 0.5 * (left + right);
      if (cdf(mid) < p) {
        left = mid;
      } else {
        right = mid;
      }
    }
    return 0.5 * (left + right);
  }

  /// Mean and variance by integrating the tail functions of the CDF.
  [[nodiscard]] std::pair<double, double> moments() const {
    using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto upper_tail = [this](double x) { return 1.0 - cdf(x); };
    auto lower_tail = [this](double x) { return cdf(-x); };
    const double limit = 16.0;
    const double m1 = gk::integrate(upper_tail, 0.0, limit, 15, 1e-12) -
                      gk::integrate(lower_tail, 0.0, limit, 15, 1e-12);
    const double m2 =
        gk::integrate([&](double x) { return 2.0 * x * upper_tail(x); }, 0.0, limit, 15, 1e-12) +
        gk::integrate([&](double x) { return 2.0 * x * lower_tail(x); }, 0.0, limit, 15, 1e-12);
    return {m1, m2 - m1 * m1};
  }

 private:
  [[nodiscard]] double left_log_ratio(double s) const {
    const double a = -s;
    const double a0 = -lo();
    return -(a * a * a - a0 * a0 * a0) / 12.0 - std::log(a / a0) / 8.0;
  }

  [[nodiscard]] double right_log_ratio(double s) const {
    const double s0 = hi();
    return -4.0 / 3.0 * (std::pow(s, 1.5) - std::pow(s0, 1.5)) - 1.5 * std::log(s / s0);
  }

  Tw2Table table_;
  boost::math::interpolators::pchip<std::vector<double>> interp_;
};

/// Process-wide distribution built once on first use.
inline const Tw2Distribution& tw2() {
  static const Tw2Distribution dist(build_tw2_table());
  return dist;
}

inline double tw2_cdf(double s) { return tw2().cdf(s); }
inline double tw2_sf(double s) { return tw2().sf(s); }
inline double tw2_pdf(double s) { return tw2().pdf(s); }
inline double tw2_quantile(double p) { return tw2().quantile(p); }

struct CenteringConstants {
  double mu = 0.0;
  double sigma = 0.0;
};

/// Centering and scaling of lambda_2 / sigma_n^2 for M antennas and 2N
/// samples (an (M-1)-dimensional white Wishart edge).
inline CenteringConstants centering_constants(int m, int n) {
  if (m < 2 || n < 1) throw ConfigError("centering constants need M >= 2, N >= 1");
  const double two_n = 2.0 * n;
  const double ratio = std::sqrt((m - 1) / two_n);
  const double mu = (1.0 + ratio) * (1.0 + ratio);
  const double sigma = (1.0 / std::sqrt(two_n)) * (1.0 + ratio) *
                       std::cbrt(1.0 / std::sqrt(two_n) + 1.0 / std::sqrt(static_cast<double>(m - 1)));
  return {mu, sigma};
}

}  // namespace ambc
