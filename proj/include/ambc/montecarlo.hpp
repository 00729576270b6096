#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ambc/config.hpp"
#include "ambc/covariance.hpp"
#include "ambc/detectors.hpp"
#include "ambc/errors.hpp"
#include "ambc/model.hpp"
#include "ambc/rng.hpp"
#include "ambc/theory.hpp"

namespace ambc {

enum class DetectorKind {
  Se,            // second-largest eigenvalue, switched noise estimate
  SeUnmodified,  // second-largest eigenvalue, H1-line noise estimate only
  Glrt,          // genie likelihood ratio on Y1
  Le,            // largest eigenvalue baseline
  Energy,        // Y1/Y0 energy-ratio baseline
};

inline std::string_view to_string(DetectorKind d) {
  switch (d) {
    case DetectorKind::Se: return "SE";
    case DetectorKind::SeUnmodified: return "SE_UNMOD";
    case DetectorKind::Glrt: return "GLRT";
    case DetectorKind::Le: return "LE";
    case DetectorKind::Energy: return "ENERGY";
  }
  return "?";
}

inline DetectorKind parse_detector(std::string_view tag) {
  for (auto d : {DetectorKind::Se, DetectorKind::SeUnmodified, DetectorKind::Glrt,
                 DetectorKind::Le, DetectorKind::Energy}) {
    if (tag == to_string(d)) return d;
  }
  throw ConfigError("unknown detector '" + std::string(tag) + "'");
}

enum class ThresholdMode { Analytic, Calibrated };

/// Purpose tags keep trial and calibration draws on disjoint streams.
namespace stream_tag {
inline constexpr std::uint64_t kTrial = 0x7472'6961'6cULL;
inline constexpr std::uint64_t kCalibration = 0x6361'6c69'62ULL;
}  // namespace stream_tag

struct RunOptions {
  int workers = 1;
};

struct TrialDraw {
  int truth = 0;
  ReceivedFrame frame;
};

/// Everything random in trial `index` comes from one stream keyed by
/// (cfg.seed, index, tag). The bit is always drawn first, so forcing it keeps
/// the channel and frame draws identical.
inline TrialDraw draw_trial(const SystemConfig& cfg, std::uint64_t index,
                            std::uint64_t tag = stream_tag::kTrial,
                            std::optional<int> force_truth = std::nullopt) {
  auto rng = derive_stream(cfg.seed, index, tag);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  int truth = uniform(rng) < cfg.prior_c1 ? 1 : 0;
  if (force_truth) truth = *force_truth;
  const auto ch = generate_channels(cfg, rng);
  return {truth, synthesize_frame(cfg, ch, truth, rng)};
}

/// Statistic of `detector` for one frame; the detector decides 1 iff the
/// statistic exceeds its threshold (0 for the GLRT).
inline double detector_statistic(DetectorKind detector, const SystemConfig& cfg,
                                 const ReceivedFrame& frame) {
  switch (detector) {
    case DetectorKind::Se:
      return se_statistic(eigen_spectrum(sample_covariance(frame)), cfg.m_index);
    case DetectorKind::SeUnmodified:
      return se_statistic(eigen_spectrum(sample_covariance(frame)), cfg.m_index,
                          NoiseEstimator::Unmodified);
    case DetectorKind::Glrt:
      return glrt_statistic(frame, column_covariance(cfg, frame.channels, Hypothesis::H0),
                            column_covariance(cfg, frame.channels, Hypothesis::H1));
    case DetectorKind::Le:
      return le_statistic(frame, cfg.m_index);
    case DetectorKind::Energy:
      return energy_statistic(frame);
  }
  throw ConfigError("unknown detector");
}

struct TrialOutcome {
  int truth = 0;
  int decided = 0;
};

inline TrialOutcome run_trial(const SystemConfig& cfg, DetectorKind detector, double eta,
                              std::uint64_t trial_index) {
  const auto draw = draw_trial(cfg, trial_index);
  return {draw.truth, detector_statistic(detector, cfg, draw.frame) > eta ? 1 : 0};
}

/// Runs fn(begin, end) over contiguous chunks of [0, count) on `workers`
/// threads. The first exception (in chunk order) is rethrown.
template <class Fn>
void parallel_for(std::uint64_t count, int workers, Fn&& fn) {
  const auto chunks = static_cast<std::uint64_t>(std::max(1, workers));
  if (chunks == 1 || count < 2) {
    fn(std::uint64_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    const std::uint64_t begin = count * c / chunks;
    const std::uint64_t end = count * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Per-trial truth bits and detector statistics, indexed by trial.
struct TrialStatistics {
  std::vector<DetectorKind> detectors;
  std::vector<std::uint8_t> truth;
  std::vector<std::vector<double>> values;  // [detector][trial]

  [[nodiscard]] const std::vector<double>& of(DetectorKind d) const {
    for (std::size_t i = 0; i < detectors.size(); ++i) {
      if (detectors[i] == d) return values[i];
    }
    throw ConfigError("detector was not collected");
  }
};

/// Simulates `trials` frames once and evaluates every requested detector on
/// each. Eigen-based statistics share one spectrum per frame.
inline TrialStatistics collect_statistics(const SystemConfig& cfg,
                                          std::span<const DetectorKind> detectors,
                                          std::uint64_t trials, const RunOptions& options = {},
                                          std::optional<int> force_truth = std::nullopt,
                                          std::uint64_t tag = stream_tag::kTrial) {
  cfg.validate();
  if (detectors.empty()) throw ConfigError("no detectors requested");
  TrialStatistics out;
  out.detectors.assign(detectors.begin(), detectors.end());
  out.truth.assign(trials, 0);
  out.values.assign(detectors.size(), std::vector<double>(trials, 0.0));

  parallel_for(trials, options.workers, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      const auto draw = draw_trial(cfg, t, tag, force_truth);
      out.truth[t] = static_cast<std::uint8_t>(draw.truth);
      std::optional<EigenSpectrum> spec;
      auto spectrum = [&]() -> const EigenSpectrum& {
        if (!spec) spec = eigen_spectrum(sample_covariance(draw.frame));
        return *spec;
      };
      for (std::size_t d = 0; d < detectors.size(); ++d) {
        double value;
        switch (detectors[d]) {
          case DetectorKind::Se:
            value = se_statistic(spectrum(), cfg.m_index);
            break;
          case DetectorKind::SeUnmodified:
            value = se_statistic(spectrum(), cfg.m_index, NoiseEstimator::Unmodified);
            break;
          case DetectorKind::Le: {
            const auto est = estimate_noise_variance(spectrum(), cfg.m_index);
            if (!(est.sigma2 > 0.0)) throw DegenerateInput("noise-variance estimate is not positive");
            value = spectrum().lambda(1) / est.sigma2;
            break;
          }
          default:
            value = detector_statistic(detectors[d], cfg, draw.frame);
        }
        out.values[d][t] = value;
      }
    }
  });
  return out;
}

struct ErrorCounts {
  std::uint64_t trials = 0;
  std::uint64_t h0_trials = 0;
  std::uint64_t h1_trials = 0;
  std::uint64_t false_alarms = 0;
  std::uint64_t misses = 0;

  [[nodiscard]] std::uint64_t errors() const { return false_alarms + misses; }
};

/// Decision rule: bit 1 iff statistic > eta (ties decide 0).
inline ErrorCounts count_errors(std::span<const std::uint8_t> truth, std::span<const double> stats,
                                double eta) {
  ErrorCounts c;
  c.trials = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int decided = stats[i] > eta ? 1 : 0;
    if (truth[i] == 0) {
      ++c.h0_trials;
      c.false_alarms += static_cast<std::uint64_t>(decided);
    } else {
      ++c.h1_trials;
      c.misses += static_cast<std::uint64_t>(1 - decided);
    }
  }
  return c;
}

/// 95% normal-approximation half-width with a 0.5/n continuity term.
inline double binomial_ci95(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  const double p = static_cast<double>(successes) / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  return 1.96 * std::sqrt(p * (1.0 - p) / nn) + 0.5 / nn;
}

inline constexpr std::uint64_t kLowConfidenceErrors = 20;

struct MetricRow {
  std::string axis;
  std::string axis_value;
  DetectorKind detector = DetectorKind::Se;
  double eta = 0.0;
  ErrorCounts counts;
  double ber = 0.0;
  double ber_ci95 = 0.0;
  double pfa_emp = std::numeric_limits<double>::quiet_NaN();
  double pmd_emp = std::numeric_limits<double>::quiet_NaN();
  bool low_confidence = false;
  double ber_analytic = std::numeric_limits<double>::quiet_NaN();
  double pmd_analytic = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::string error;  // non-empty when this point failed

  [[nodiscard]] std::uint64_t trials() const { return counts.trials; }
};

inline MetricRow metrics_from_counts(const ErrorCounts& c, DetectorKind detector, double eta) {
  MetricRow row;
  row.detector = detector;
  row.eta = eta;
  row.counts = c;
  if (c.trials > 0) {
    row.ber = static_cast<double>(c.errors()) / static_cast<double>(c.trials);
    row.ber_ci95 = binomial_ci95(c.errors(), c.trials);
  }
  if (c.h0_trials > 0) {
    row.pfa_emp = static_cast<double>(c.false_alarms) / static_cast<double>(c.h0_trials);
  }
  if (c.h1_trials > 0) row.pmd_emp = static_cast<double>(c.misses) / static_cast<double>(c.h1_trials);
  row.low_confidence = c.errors() < kLowConfidenceErrors;
  return row;
}

/// Empirical BER, P_fa and P_md of one detector at a fixed threshold.
inline MetricRow estimate_metrics(const SystemConfig& cfg, DetectorKind detector, double eta,
                                  std::uint64_t trials, const RunOptions& options = {}) {
  if (trials < 100) throw ConfigError("at least 100 trials are required");
  const DetectorKind one[] = {detector};
  const auto stats = collect_statistics(cfg, one, trials, options);
  auto row = metrics_from_counts(count_errors(stats.truth, stats.values[0], eta), detector, eta);
  row.seed = cfg.seed;
  return row;
}

/// Same bookkeeping for an arbitrary decision rule decide(draw, index) -> bit.
template <class Decider>
MetricRow estimate_metrics_with(const SystemConfig& cfg, std::uint64_t trials, Decider&& decide,
                                const RunOptions& options = {}) {
  if (trials < 100) throw ConfigError("at least 100 trials are required");
  std::vector<std::uint8_t> truth(trials);
  std::vector<double> decided(trials);
  parallel_for(trials, options.workers, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      const auto draw = draw_trial(cfg, t);
      truth[t] = static_cast<std::uint8_t>(draw.truth);
      decided[t] = static_cast<double>(decide(draw, t));
    }
  });
  auto row = metrics_from_counts(count_errors(truth, decided, 0.5), DetectorKind::Se, 0.5);
  row.seed = cfg.seed;
  return row;
}

/// Threshold with at most a fraction `pfa` of the given H0 statistics above it.
inline double empirical_threshold(std::vector<double> h0_stats, double pfa) {
  if (h0_stats.empty()) throw ConfigError("no calibration statistics");
  if (!(pfa > 0.0 && pfa < 1.0)) throw DomainError("pfa must lie in (0,1)");
  std::sort(h0_stats.begin(), h0_stats.end());
  const auto n = h0_stats.size();
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - pfa) * static_cast<double>(n)));
  idx = std::min(idx == 0 ? 0 : idx - 1, n - 1);
  return h0_stats[idx];
}

/// Calibrates a detector threshold to a target P_fa on H0-only frames drawn
/// from the calibration stream.
inline double calibrate_threshold(const SystemConfig& cfg, DetectorKind detector, double pfa,
                                  std::uint64_t trials, const RunOptions& options = {}) {
  const DetectorKind one[] = {detector};
  const auto stats = collect_statistics(cfg, one, trials, options, 0, stream_tag::kCalibration);
  return empirical_threshold(stats.values[0], pfa);
}

struct RocPoint {
  double pfa_target = 0.0;
  double eta = 0.0;
  double pmd_emp = 0.0;
  double pmd_ci95 = 0.0;
  double pmd_analytic = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t h1_trials = 0;
};

/// Complementary ROC of the SE detector: analytic thresholds per P_fa target,
/// empirical P_md over H1 trials (channels redrawn per trial), and the
/// averaged analytic P_md.
inline std::vector<RocPoint> roc_curve(const SystemConfig& cfg, std::span<const double> pfa_grid,
                                       std::uint64_t trials, const RunOptions& options = {}) {
  for (double p : pfa_grid) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("ROC grid values must lie in (0,1)");
  }
  const DetectorKind one[] = {DetectorKind::Se};
  const auto stats = collect_statistics(cfg, one, trials, options, 1);
  std::vector<RocPoint> out;
  for (double p : pfa_grid) {
    RocPoint pt;
    pt.pfa_target = p;
    pt.eta = threshold_for_pfa(p, cfg.m, cfg.n);
    const auto counts = count_errors(stats.truth, stats.values[0], pt.eta);
    pt.h1_trials = counts.h1_trials;
    pt.pmd_emp = static_cast<double>(counts.misses) / static_cast<double>(counts.h1_trials);
    pt.pmd_ci95 = binomial_ci95(counts.misses, counts.h1_trials);
    try {
      pt.pmd_analytic = pmd_average(pt.eta, cfg);
    } catch (const std::exception&) {
      // left as NaN: no analytic model for this configuration (e.g. k = 1)
    }
    out.push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

inline constexpr std::string_view kAxes[] = {"gamma_db", "delta_gamma_db", "m",          "n",
                                              "k",        "pfa_target",     "modulation", "none"};

inline bool is_known_axis(std::string_view axis) {
  return std::find(std::begin(kAxes), std::end(kAxes), axis) != std::end(kAxes);
}

struct SweepSpec {
  SystemConfig base;
  std::string axis = "none";
  std::vector<std::string> values{""};  // textual so that "8/7" and "QAM16" survive
  std::uint64_t trials = 100000;
  std::uint64_t calibration_trials = 0;  // 0 means "same as trials"
  std::vector<DetectorKind> detectors{DetectorKind::Se};
  ThresholdMode threshold_mode = ThresholdMode::Analytic;
  double pfa_target = 0.01;

  void validate() const {
    base.validate();
    if (!is_known_axis(axis)) throw ConfigError("unknown sweep axis '" + axis + "'");
    if (values.empty()) throw ConfigError("sweep values must be non-empty");
    if (trials < 100) throw ConfigError("trials must be >= 100");
    if (detectors.empty()) throw ConfigError("detector list must be non-empty");
    if (!(pfa_target > 0.0 && pfa_target < 1.0)) throw ConfigError("pfa_target must lie in (0,1)");
  }
};

struct SweepPoint {
  SystemConfig cfg;
  double pfa_target = 0.0;
};

inline double parse_axis_number(const std::string& text, std::string_view axis) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("bad value '" + text + "' for axis " + std::string(axis));
  }
}

inline int parse_axis_int(const std::string& text, std::string_view axis) {
  const double v = parse_axis_number(text, axis);
  if (v != std::floor(v)) throw ConfigError("axis " + std::string(axis) + " needs integers");
  return static_cast<int>(v);
}

/// Applies one axis value to the base configuration and re-validates it.
inline SweepPoint apply_axis(const SweepSpec& spec, const std::string& value) {
  SweepPoint pt{spec.base, spec.pfa_target};
  const auto& axis = spec.axis;
  if (axis == "gamma_db") {
    pt.cfg.gamma_db = parse_axis_number(value, axis);
  } else if (axis == "delta_gamma_db") {
    pt.cfg.delta_gamma_db = parse_axis_number(value, axis);
  } else if (axis == "m") {
    pt.cfg.m = parse_axis_int(value, axis);
  } else if (axis == "n") {
    pt.cfg.n = parse_axis_int(value, axis);
  } else if (axis == "k") {
    pt.cfg.k = IdaskRatio::parse(value);
  } else if (axis == "pfa_target") {
    pt.pfa_target = parse_axis_number(value, axis);
    if (!(pt.pfa_target > 0.0 && pt.pfa_target < 1.0)) throw ConfigError("pfa_target must lie in (0,1)");
  } else if (axis == "modulation") {
    pt.cfg.modulation = parse_modulation(value);
  } else if (axis != "none") {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
  pt.cfg.validate();
  return pt;
}

inline bool uses_analytic_threshold(DetectorKind d, ThresholdMode mode) {
  return mode == ThresholdMode::Analytic &&
         (d == DetectorKind::Se || d == DetectorKind::SeUnmodified);
}

/// One row per (axis value, detector), in that order. A failing point yields
/// rows carrying the error message; the sweep continues.
inline std::vector<MetricRow> sweep(const SweepSpec& spec, const RunOptions& options = {}) {
  spec.validate();
  const std::uint64_t calib_trials = spec.calibration_trials ? spec.calibration_trials : spec.trials;
  std::vector<MetricRow> rows;
  for (const auto& value : spec.values) {
    std::vector<MetricRow> point_rows;
    try {
      const auto pt = apply_axis(spec, value);
      std::vector<double> eta(spec.detectors.size(), 0.0);
      std::vector<DetectorKind> to_calibrate;
      for (std::size_t i = 0; i < spec.detectors.size(); ++i) {
        const auto d = spec.detectors[i];
        if (uses_analytic_threshold(d, spec.threshold_mode)) {
          eta[i] = threshold_for_pfa(pt.pfa_target, pt.cfg.m, pt.cfg.n);
        } else if (d != DetectorKind::Glrt) {
          to_calibrate.push_back(d);
        }
      }
      if (!to_calibrate.empty()) {
        const auto calib = collect_statistics(pt.cfg, to_calibrate, calib_trials, options, 0,
                                              stream_tag::kCalibration);
        for (std::size_t i = 0; i < spec.detectors.size(); ++i) {
          const auto d = spec.detectors[i];
          if (std::find(to_calibrate.begin(), to_calibrate.end(), d) != to_calibrate.end()) {
            eta[i] = empirical_threshold(calib.of(d), pt.pfa_target);
          }
        }
      }
      const auto stats = collect_statistics(pt.cfg, spec.detectors, spec.trials, options);
      for (std::size_t i = 0; i < spec.detectors.size(); ++i) {
        auto row = metrics_from_counts(count_errors(stats.truth, stats.values[i], eta[i]),
                                       spec.detectors[i], eta[i]);
        if (spec.detectors[i] == DetectorKind::Se) {
          try {
            row.pmd_analytic = pmd_average(eta[i], pt.cfg);
            if (pt.cfg.prior_c1 == 0.5) row.ber_analytic = ber_analytic(eta[i], pt.cfg);
          } catch (const std::exception&) {
            // no analytic overlay for this point
          }
        }
        point_rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      point_rows.clear();
      for (auto d : spec.detectors) {
        MetricRow row;
        row.detector = d;
        row.error = e.what();
        point_rows.push_back(std::move(row));
      }
    }
    for (auto& row : point_rows) {
      row.axis = spec.axis;
      row.axis_value = value;
      row.seed = spec.base.seed;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ambc
