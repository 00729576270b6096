#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ambc/config.hpp"
#include "ambc/rng.hpp"
#include "ambc/types.hpp"

namespace ambc {

/// One draw of the direct link h1 and the cascaded backscatter link h2.
struct ChannelRealization {
  CVector h1;
  CVector h2;
};

/// IDASK reflection states b_1..b_2N.
struct GateSequence {
  std::vector<std::uint8_t> bits;

  [[nodiscard]] std::size_t ones() const {
    std::size_t count = 0;
    for (auto b : bits) count += b;
    return count;
  }
};

/// M x 2N received samples for one BD symbol.
struct ReceivedFrame {
  CMatrix y;
  int truth_bit = 0;
  ChannelRealization channels;
  /// Column at which the reflected partition Y1 starts, (1 - 1/k) 2N.
  int reflect_start = 0;

  [[nodiscard]] int antennas() const { return static_cast<int>(y.rows()); }
  [[nodiscard]] int columns() const { return static_cast<int>(y.cols()); }
  [[nodiscard]] auto y0() const { return y.leftCols(reflect_start); }
  [[nodiscard]] auto y1() const { return y.rightCols(y.cols() - reflect_start); }
};

/// Per-entry variances 1 (direct) and delta_gamma (cascaded), so that
/// E|h2|^2 / E|h1|^2 equals delta_gamma.
template <class Urbg>
ChannelRealization generate_channels(const SystemConfig& cfg, Urbg& rng) {
  cfg.validate();
  ChannelRealization ch{CVector(cfg.m), CVector(cfg.m)};
  const double cascaded_var = cfg.delta_gamma();
  for (int i = 0; i < cfg.m; ++i) ch.h1(i) = complex_normal(rng, 1.0);
  for (int i = 0; i < cfg.m; ++i) {
    ch.h2(i) = cascaded_var > 0.0 ? complex_normal(rng, cascaded_var) : Complex{};
  }
  return ch;
}

namespace detail {

inline constexpr std::array<double, 4> kQam16Levels{-3.0, -1.0, 1.0, 3.0};

template <class Urbg>
Complex unit_symbol(Modulation mod, Urbg& rng) {
  switch (mod) {
    case Modulation::Gaussian:
      return complex_normal(rng, 1.0);
    case Modulation::Bpsk: {
      std::uniform_int_distribution<int> bit(0, 1);
      return {bit(rng) ? 1.0 : -1.0, 0.0};
    }
    case Modulation::Qpsk: {
      std::uniform_int_distribution<int> sym(0, 3);
      const int s = sym(rng);
      const double a = 1.0 / std::sqrt(2.0);
      return {(s & 1) ? a : -a, (s & 2) ? a : -a};
    }
    case Modulation::Qam16: {
      std::uniform_int_distribution<int> level(0, 3);
      const double scale = 1.0 / std::sqrt(10.0);
      const double re = kQam16Levels[static_cast<std::size_t>(level(rng))];
      const double im = kQam16Levels[static_cast<std::size_t>(level(rng))];
      return {re * scale, im * scale};
    }
  }
  throw ConfigError("unknown modulation");
}

}  // namespace detail

/// i.i.d. zero-mean ambient samples with variance sigma_s^2.
template <class Urbg>
CVector generate_ambient(const SystemConfig& cfg, Urbg& rng, int length) {
  if (length < 1) throw ConfigError("ambient length must be >= 1");
  const double amplitude = std::sqrt(cfg.signal_var());
  CVector s(length);
  if (cfg.modulation == Modulation::Gaussian) {
    std::normal_distribution<double> unit(0.0, std::sqrt(0.5));
    for (int i = 0; i < length; ++i) {
      const double re = unit(rng);
      const double im = unit(rng);
      s(i) = amplitude * Complex{re, im};
    }
    return s;
  }
  for (int i = 0; i < length; ++i) s(i) = amplitude * detail::unit_symbol(cfg.modulation, rng);
  return s;
}

inline GateSequence idask_gate_sequence(const SystemConfig& cfg, int c) {
  if (c != 0 && c != 1) throw ConfigError("BD bit must be 0 or 1");
  const int start = cfg.reflect_start();
  GateSequence gate{std::vector<std::uint8_t>(static_cast<std::size_t>(cfg.two_n()), 0)};
  if (c == 1) {
    for (int i = start; i < cfg.two_n(); ++i) gate.bits[static_cast<std::size_t>(i)] = 1;
  }
  return gate;
}

/// Column n of Y is h1 s_n + b_n h2 s_n + u_n. Draw order: ambient samples,
/// then noise column by column.
template <class Urbg>
ReceivedFrame synthesize_frame(const SystemConfig& cfg, const ChannelRealization& ch, int c,
                               Urbg& rng) {
  cfg.validate();
  if (ch.h1.size() != cfg.m || ch.h2.size() != cfg.m) {
    throw ConfigError("channel length does not match M");
  }
  const auto gate = idask_gate_sequence(cfg, c);
  const CVector s = generate_ambient(cfg, rng, cfg.two_n());
  const CVector reflected = ch.h1 + ch.h2;
  const double noise_scale = std::sqrt(cfg.noise_var() / 2.0);
  std::normal_distribution<double> unit(0.0, 1.0);

  ReceivedFrame frame;
  frame.truth_bit = c;
  frame.channels = ch;
  frame.reflect_start = cfg.reflect_start();
  frame.y.resize(cfg.m, cfg.two_n());
  for (int col = 0; col < cfg.two_n(); ++col) {
    const auto& path = gate.bits[static_cast<std::size_t>(col)] ? reflected : ch.h1;
    for (int row = 0; row < cfg.m; ++row) {
      const double re = unit(rng);
      const double im = unit(rng);
      frame.y(row, col) = path(row) * s(col) + noise_scale * Complex{re, im};
    }
  }
  return frame;
}

}  // namespace ambc
