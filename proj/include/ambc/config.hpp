#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>

#include "ambc/errors.hpp"

namespace ambc {

inline double db_to_linear(double db) {
  if (std::isinf(db) && db < 0) return 0.0;
  return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

enum class Modulation { Gaussian, Bpsk, Qpsk, Qam16 };

inline std::string_view to_string(Modulation m) {
  switch (m) {
    case Modulation::Gaussian: return "GAUSSIAN";
    case Modulation::Bpsk: return "BPSK";
    case Modulation::Qpsk: return "QPSK";
    case Modulation::Qam16: return "QAM16";
  }
  return "?";
}

inline Modulation parse_modulation(std::string_view tag) {
  if (tag == "GAUSSIAN") return Modulation::Gaussian;
  if (tag == "BPSK") return Modulation::Bpsk;
  if (tag == "QPSK") return Modulation::Qpsk;
  if (tag == "QAM16") return Modulation::Qam16;
  throw ConfigError("unknown modulation '" + std::string(tag) + "'");
}

/// The IDASK ratio parameter k, kept as an exact rational so that values such
/// as 8/7 keep 2N/k integral.
class IdaskRatio {
 public:
  constexpr IdaskRatio() = default;
  IdaskRatio(std::int64_t num, std::int64_t den = 1) : num_(num), den_(den) {
    if (den_ <= 0 || num_ <= 0) throw ConfigError("k must be a positive rational");
    const auto g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  /// Accepts "8/7", "2", "1.5"; decimals are matched to the nearest rational
  /// with denominator <= 1000.
  static IdaskRatio parse(std::string_view text) {
    const auto slash = text.find('/');
    try {
      if (slash != std::string_view::npos) {
        const auto num = std::stoll(std::string(text.substr(0, slash)));
        const auto den = std::stoll(std::string(text.substr(slash + 1)));
        return IdaskRatio(num, den);
      }
      return from_double(std::stod(std::string(text)));
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse k from '" + std::string(text) + "'");
    }
  }

  static IdaskRatio from_double(double k) {
    if (!(k > 0) || !std::isfinite(k)) throw ConfigError("k must be a positive finite number");
    for (std::int64_t den = 1; den <= 1000; ++den) {
      const double num = std::round(k * static_cast<double>(den));
      if (std::abs(num - k * static_cast<double>(den)) < 1e-9 * static_cast<double>(den)) {
        return IdaskRatio(static_cast<std::int64_t>(num), den);
      }
    }
    throw ConfigError("k is not a rational with a small denominator");
  }

  [[nodiscard]] std::int64_t num() const { return num_; }
  [[nodiscard]] std::int64_t den() const { return den_; }
  [[nodiscard]] double value() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// K(k) = 1/k - 1/k^2, the fraction of backscatter energy that lands on the
  /// second covariance eigenvalue.
  [[nodiscard]] double energy_factor() const {
    const double inv = static_cast<double>(den_) / static_cast<double>(num_);
    return inv - inv * inv;
  }

  [[nodiscard]] std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend bool operator==(const IdaskRatio&, const IdaskRatio&) = default;

 private:
  std::int64_t num_ = 2;
  std::int64_t den_ = 1;
};

struct SystemConfig {
  int m = 5;                  // receive antennas
  int n = 50;                 // half-symbol length; a frame has 2N samples
  IdaskRatio k{2};
  double gamma_db = 30.0;     // sigma_s^2 / sigma_n^2; -inf means no ambient signal
  double delta_gamma_db = -30.0;  // E|h2|^2 / E|h1|^2; -inf means no backscatter link
  double noise_var_dbm = -20.0;
  Modulation modulation = Modulation::Gaussian;
  double prior_c1 = 0.5;
  int m_index = 3;
  std::uint64_t seed = 1;

  [[nodiscard]] int two_n() const { return 2 * n; }
  [[nodiscard]] double noise_var() const { return db_to_linear(noise_var_dbm); }
  [[nodiscard]] double gamma() const { return db_to_linear(gamma_db); }
  [[nodiscard]] double signal_var() const { return gamma() * noise_var(); }
  [[nodiscard]] double delta_gamma() const { return db_to_linear(delta_gamma_db); }

  /// Number of reflected samples 2N/k at the frame tail when c = 1.
  [[nodiscard]] int reflected_length() const {
    const std::int64_t scaled = static_cast<std::int64_t>(two_n()) * k.den();
    if (scaled % k.num() != 0) {
      throw ConfigError("2N/k must be an integer (2N=" + std::to_string(two_n()) +
                        ", k=" + k.str() + ")");
    }
    return static_cast<int>(scaled / k.num());
  }

  /// First reflected column index, (1 - 1/k) 2N.
  [[nodiscard]] int reflect_start() const { return two_n() - reflected_length(); }

  void validate() const {
    if (m < 2) throw ConfigError("M must be >= 2");
    if (n < 1) throw ConfigError("N must be >= 1");
    if (k.num() < k.den()) throw ConfigError("k must be >= 1");
    if (k.num() > static_cast<std::int64_t>(two_n()) * k.den()) throw ConfigError("k must be <= 2N");
    (void)reflected_length();
    if (std::isnan(gamma_db) || gamma_db == std::numeric_limits<double>::infinity()) {
      throw ConfigError("gamma_db must be finite or -inf");
    }
    if (std::isnan(delta_gamma_db) || delta_gamma_db == std::numeric_limits<double>::infinity()) {
      throw ConfigError("delta_gamma_db must be finite or -inf");
    }
    if (!std::isfinite(noise_var_dbm)) throw ConfigError("noise_var_dbm must be finite");
    if (!(prior_c1 >= 0.0 && prior_c1 <= 1.0)) throw ConfigError("prior_c1 must lie in [0,1]");
    if (m >= 3 && (m_index < 3 || m_index > m)) {
      throw ConfigError("m_index must satisfy 3 <= m_index <= M");
    }
  }
};

}  // namespace ambc
