#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ambc/ambc.hpp"

namespace fs = std::filesystem;
using namespace ambc;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumeric = 3, kIo = 4 };

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_out) {
  cmd->add_option("--config", a.config, "JSON run configuration")->required();
  if (with_out) cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--seed", a.seed, "master seed (overrides the file)");
  cmd->add_option("--trials", a.trials, "trials per point (overrides the file)");
  cmd->add_option("--workers", a.workers, "worker threads")->check(CLI::PositiveNumber);
}

RunConfig load(const CommonArgs& a) {
  auto rc = load_run_config(a.config);
  if (a.seed) {
    rc.spec.base.seed = *a.seed;
    rc.document["seed"] = *a.seed;
  }
  if (a.trials) {
    rc.spec.trials = *a.trials;
    rc.document["trials"] = *a.trials;
  }
  rc.spec.validate();
  return rc;
}

void check_pfa(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("--pfa must lie in (0,1)");
}

fs::path prepare_out(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory " + dir);
  return out;
}

std::string figure_title(const RunConfig& rc, std::string_view what) {
  const auto& c = rc.spec.base;
  std::ostringstream os;
  os << what << ": M=" << c.m << " 2N=" << c.two_n() << " k=" << c.k.str()
     << " gamma=" << fmt(c.gamma_db) << "dB dgamma=" << fmt(c.delta_gamma_db) << "dB";
  if (rc.spec.axis != "none") os << " vs " << rc.spec.axis;
  return os.str();
}

int cmd_detect(const CommonArgs& a, std::optional<double> eta, std::optional<double> pfa,
               const std::string& frame_in, const std::string& frame_out) {
  if (eta.has_value() == pfa.has_value()) throw ConfigError("give exactly one of --eta and --pfa");
  if (pfa) check_pfa(*pfa);
  auto rc = load(a);
  auto cfg = rc.spec.base;
  if (rc.spec.axis != "none" && !rc.spec.values.empty()) {
    cfg = apply_axis(rc.spec, rc.spec.values.front()).cfg;
  }
  if (cfg.m < 3) throw ConfigError("the SE detector needs M >= 3");

  ReceivedFrame frame;
  std::optional<int> truth;
  if (!frame_in.empty()) {
    frame.y = read_frame(frame_in);
    if (frame.y.rows() != cfg.m || frame.y.cols() != cfg.two_n()) {
      throw ConfigError("frame file is " + std::to_string(frame.y.rows()) + "x" +
                        std::to_string(frame.y.cols()) + " but the config expects " +
                        std::to_string(cfg.m) + "x" + std::to_string(cfg.two_n()));
    }
    frame.reflect_start = cfg.reflect_start();
  } else {
    auto draw = draw_trial(cfg, 0);
    frame = std::move(draw.frame);
    truth = draw.truth;
  }
  if (!frame_out.empty()) write_frame(frame_out, frame.y);

  const double threshold = eta ? *eta : threshold_for_pfa(*pfa, cfg.m, cfg.n);
  const auto out = se_detect(frame, threshold, cfg.m_index);
  std::printf("statistic=%s threshold=%s noise_var_est=%s branch=%s decision=%d",
              fmt(out.statistic).c_str(), fmt(out.threshold).c_str(),
              fmt(out.noise_var_est).c_str(), std::string(to_string(out.branch)).c_str(),
              out.decided_bit);
  if (truth) std::printf(" truth=%d", *truth);
  std::printf("\n");
  return kOk;
}

int cmd_sweep(const CommonArgs& a) {
  const auto rc = load(a);
  const auto dir = prepare_out(a.out);
  const auto rows = sweep(rc.spec, RunOptions{a.workers});
  const auto head = provenance_line(rc.spec.base.seed, config_hash(rc.document));

  std::vector<CsvTable> tables;
  bool any_error = false;
  for (auto d : rc.spec.detectors) {
    std::string text = head + "\n" + std::string(kSweepHeader) + "\n";
    for (const auto& r : rows) {
      if (r.detector != d) continue;
      text += sweep_csv_row(r) + "\n";
      if (!r.error.empty()) {
        any_error = true;
        std::cerr << "point " << r.axis << "=" << r.axis_value << " " << to_string(d)
                  << " failed: " << r.error << "\n";
      }
    }
    const auto path = dir / ("sweep_" + std::string(to_string(d)) + ".csv");
    write_text(path, text);
    tables.push_back(parse_csv(read_text(path)));
    std::cout << path.string() << "\n";
  }
  const auto svg = dir / "sweep.svg";
  write_text(svg, plot_from_csv(tables, "sweep", figure_title(rc, "BER")));
  std::cout << svg.string() << "\n";
  return any_error ? kNumeric : kOk;
}

int cmd_roc(const CommonArgs& a) {
  const auto rc = load(a);
  const auto dir = prepare_out(a.out);
  std::vector<double> grid{1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1};
  std::vector<std::string> values = rc.spec.values;
  if (rc.spec.axis == "pfa_target") {
    grid.clear();
    for (const auto& v : values) grid.push_back(parse_axis_number(v, "pfa_target"));
    std::sort(grid.begin(), grid.end());
    values = {""};
  }
  auto curve_spec = rc.spec;
  if (rc.spec.axis == "pfa_target") curve_spec.axis = "none";

  std::string text = provenance_line(rc.spec.base.seed, config_hash(rc.document)) + "\n" +
                     std::string(kRocHeader) + "\n";
  for (const auto& value : values) {
    const auto pt = apply_axis(curve_spec, value);
    for (const auto& p : roc_curve(pt.cfg, grid, rc.spec.trials, RunOptions{a.workers})) {
      text += curve_spec.axis + "," + value + "," + fmt(p.pfa_target) + "," + fmt(p.eta) + "," +
              fmt(p.pmd_emp) + "," + fmt(p.pmd_ci95) + "," + fmt(p.pmd_analytic) + "," +
              std::to_string(p.h1_trials) + "," + std::to_string(pt.cfg.seed) + "\n";
    }
  }
  const auto path = dir / "roc.csv";
  write_text(path, text);
  const auto svg = dir / "roc.svg";
  write_text(svg, plot_from_csv({parse_csv(read_text(path))}, "roc", figure_title(rc, "P_md vs P_fa")));
  std::cout << path.string() << "\n" << svg.string() << "\n";
  return kOk;
}

int cmd_theory(const CommonArgs& a, const std::vector<double>& etas, const std::vector<double>& pfas) {
  for (double p : pfas) check_pfa(p);
  const auto rc = load(a);
  const auto dir = prepare_out(a.out);
  std::string text = provenance_line(rc.spec.base.seed, config_hash(rc.document)) + "\n" +
                     std::string(kTheoryHeader) + "\n";
  for (const auto& value : rc.spec.values) {
    const auto pt = apply_axis(rc.spec, value);
    const auto& cfg = pt.cfg;
    std::vector<double> thresholds = etas;
    for (double p : pfas) thresholds.push_back(threshold_for_pfa(p, cfg.m, cfg.n));
    if (thresholds.empty()) thresholds.push_back(threshold_for_pfa(pt.pfa_target, cfg.m, cfg.n));
    for (double eta : thresholds) {
      const double pfa = pfa_analytic(eta, cfg.m, cfg.n);
      double pmd = std::numeric_limits<double>::quiet_NaN();
      try {
        pmd = pmd_average(eta, cfg);
      } catch (const DomainError&) {
        // no gamma_1 law (k = 1 or no backscatter link)
      }
      const double ber = cfg.prior_c1 == 0.5 ? 0.5 * (pfa + pmd) : std::numeric_limits<double>::quiet_NaN();
      text += fmt(cfg.gamma_db) + "," + fmt(eta) + "," + fmt(pfa) + "," + fmt(pmd) + "," + fmt(ber) +
              "," + fmt(ber_lower_bound(cfg.n)) + "," + std::to_string(cfg.m) + "," +
              std::to_string(cfg.n) + "," + cfg.k.str() + "\n";
    }
  }
  const auto path = dir / "theory.csv";
  write_text(path, text);
  const auto svg = dir / "theory.svg";
  write_text(svg, plot_from_csv({parse_csv(read_text(path))}, "theory", figure_title(rc, "analytic")));
  std::cout << path.string() << "\n" << svg.string() << "\n";
  return kOk;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& kind, const std::string& out,
             const std::string& title) {
  std::vector<CsvTable> tables;
  for (const auto& c : csvs) tables.push_back(parse_csv(read_text(c)));
  write_text(out, plot_from_csv(tables, kind, title));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-largest-eigenvalue detection for ambient backscatter links"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonArgs detect_args;
  std::optional<double> eta;
  std::optional<double> pfa;
  std::string frame_in;
  std::string frame_out;
  auto* detect = app.add_subcommand("detect", "run the SE detector on one frame");
  add_common(detect, detect_args, false);
  detect->add_option("--eta", eta, "decision threshold");
  detect->add_option("--pfa", pfa, "target false-alarm probability");
  detect->add_option("--frame", frame_in, "AMBC frame file to read instead of simulating");
  detect->add_option("--save-frame", frame_out, "write the frame that was detected");

  CommonArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo BER sweep");
  add_common(sweep_cmd, sweep_args, true);

  CommonArgs roc_args;
  auto* roc = app.add_subcommand("roc", "complementary ROC of the SE detector");
  add_common(roc, roc_args, true);

  CommonArgs theory_args;
  std::vector<double> theory_eta;
  std::vector<double> theory_pfa;
  auto* theory = app.add_subcommand("theory", "analytic P_fa, P_md and BER curves");
  add_common(theory, theory_args, true);
  theory->add_option("--eta", theory_eta, "threshold(s); repeatable");
  theory->add_option("--pfa", theory_pfa, "target P_fa value(s); repeatable");

  std::vector<std::string> plot_csv;
  std::string plot_kind = "sweep";
  std::string plot_out = "plot.svg";
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "re-render an SVG from CSV output");
  plot->add_option("--csv", plot_csv, "CSV file(s)")->required();
  plot->add_option("--kind", plot_kind, "sweep | roc | theory");
  plot->add_option("--out", plot_out, "SVG path");
  plot->add_option("--title", plot_title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*detect) return cmd_detect(detect_args, eta, pfa, frame_in, frame_out);
    if (*sweep_cmd) return cmd_sweep(sweep_args);
    if (*roc) return cmd_roc(roc_args);
    if (*theory) return cmd_theory(theory_args, theory_eta, theory_pfa);
    if (*plot) return cmd_plot(plot_csv, plot_kind, plot_out, plot_title);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumeric;
  }
  return kOk;
}
