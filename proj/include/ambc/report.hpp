#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ambc/errors.hpp"
#include "ambc/montecarlo.hpp"

namespace ambc {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Fixed, locale-independent number formatting used in every CSV.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string provenance_line(std::uint64_t seed, const std::string& hash) {
  return "# ambc " + std::string(kToolVersion) + " seed=" + std::to_string(seed) +
         " config_hash=" + hash;
}

inline constexpr std::string_view kSweepHeader =
    "axis,axis_value,detector,ber,ber_ci95,pfa_emp,pmd_emp,trials,seed,ber_analytic,pmd_analytic,"
    "eta,low_confidence,error";

inline std::string sweep_csv_row(const MetricRow& r) {
  std::string error = r.error;
  std::replace(error.begin(), error.end(), ',', ';');
  std::replace(error.begin(), error.end(), '\n', ' ');
  std::ostringstream os;
  os << r.axis << ',' << r.axis_value << ',' << to_string(r.detector) << ',' << fmt(r.ber) << ','
     << fmt(r.ber_ci95) << ',' << fmt(r.pfa_emp) << ',' << fmt(r.pmd_emp) << ','
     << r.counts.trials << ',' << r.seed << ',' << fmt(r.ber_analytic) << ','
     << fmt(r.pmd_analytic) << ',' << fmt(r.eta) << ',' << (r.low_confidence ? 1 : 0) << ','
     << error;
  return os.str();
}

inline constexpr std::string_view kRocHeader =
    "axis,axis_value,pfa_target,eta,pmd_emp,pmd_ci95,pmd_analytic,h1_trials,seed";

inline constexpr std::string_view kTheoryHeader =
    "gamma_db,eta,pfa,pmd_avg,ber,ber_lower_bound,m,n,k";

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// A CSV file with '#' comment lines dropped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split_csv_line(line);
    } else {
      t.rows.push_back(split_csv_line(line));
    }
  }
  if (t.header.empty()) throw IoError("CSV has no header");
  return t;
}

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<std::string> x_categories;  // non-empty: x holds category indices
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

/// Minimal static line chart. Points that are non-finite (or <= 0 on a log
/// axis) are skipped and break the polyline.
inline std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  const double width = 640, height = 420, left = 70, right = 150, top = 40, bottom = 55;
  const double pw = width - left - right, ph = height - top - bottom;
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (spec.log_y) {
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
  }
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  char buf[160];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"13\">"
     << detail::xml_escape(spec.title) << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, pw, ph);
  os << buf;

  // y ticks
  const int yticks = spec.log_y ? static_cast<int>(y1 - y0) : 5;
  for (int i = 0; i <= yticks; ++i) {
    const double t = y0 + (y1 - y0) * i / std::max(1, yticks);
    const double yy = top + ph - (t - y0) / (y1 - y0) * ph;
    char label[32];
    if (spec.log_y) {
      std::snprintf(label, sizeof label, "1e%d", static_cast<int>(std::lround(t)));
    } else {
      std::snprintf(label, sizeof label, "%.3g", t);
    }
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%s</text>\n",
                  left, yy, left + pw, yy, left - 5, yy + 4, label);
    os << buf;
  }
  // x ticks
  if (!spec.x_categories.empty()) {
    for (std::size_t i = 0; i < spec.x_categories.size(); ++i) {
      const double xx = px(static_cast<double>(i));
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">", xx,
                    top + ph + 16);
      os << buf << detail::xml_escape(spec.x_categories[i]) << "</text>\n";
    }
  } else {
    for (int i = 0; i <= 5; ++i) {
      const double t = x0 + (x1 - x0) * i / 5.0;
      const double xx = left + (t - x0) / (x1 - x0) * pw;
      char label[32];
      std::snprintf(label, sizeof label, spec.log_x ? "%.2g" : "%.3g", spec.log_x ? std::pow(10.0, t) : t);
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n", xx,
                    top + ph + 16, label);
      os << buf;
    }
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
     << detail::xml_escape(spec.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << detail::xml_escape(spec.y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = detail::kPalette[s % std::size(detail::kPalette)];
    std::string path;
    bool pen_down = false;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!usable(series[s].x[i], series[s].y[i])) {
        pen_down = false;
        continue;
      }
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f ", pen_down ? "L" : "M", px(series[s].x[i]),
                    py(series[s].y[i]));
      path += buf;
      pen_down = true;
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\"/>\n",
                    px(series[s].x[i]), py(series[s].y[i]), color);
      os << buf;
    }
    if (!path.empty()) {
      os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
         << (series[s].dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    }
    const double ly = top + 14 + 16 * static_cast<double>(s);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"%s/>",
                  left + pw + 10, ly, left + pw + 30, ly, color,
                  series[s].dashed ? " stroke-dasharray=\"5,3\"" : "");
    os << buf << "<text x=\"" << left + pw + 35 << "\" y=\"" << ly + 4 << "\">"
       << detail::xml_escape(series[s].name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

namespace detail {

inline double cell_number(const std::string& s) {
  if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    return used == s.size() ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const std::logic_error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

/// x positions for a column of axis values: numeric when every value parses
/// as a plain number, otherwise category indices.
inline std::vector<double> axis_positions(const std::vector<std::string>& values,
                                          std::vector<std::string>& categories) {
  std::vector<double> x;
  bool numeric = true;
  for (const auto& v : values) numeric = numeric && !std::isnan(cell_number(v));
  if (numeric) {
    for (const auto& v : values) x.push_back(cell_number(v));
    return x;
  }
  for (const auto& v : values) {
    auto it = std::find(categories.begin(), categories.end(), v);
    if (it == categories.end()) {
      categories.push_back(v);
      it = categories.end() - 1;
    }
    x.push_back(static_cast<double>(it - categories.begin()));
  }
  return x;
}

inline const std::string& cell(const CsvTable& t, const std::vector<std::string>& row,
                               std::string_view name) {
  const int c = t.column(name);
  if (c < 0 || static_cast<std::size_t>(c) >= row.size()) {
    throw IoError("CSV is missing column " + std::string(name));
  }
  return row[static_cast<std::size_t>(c)];
}

}  // namespace detail

/// Plots one or more CSV tables of the given kind ("sweep", "roc", "theory").
inline std::string plot_from_csv(const std::vector<CsvTable>& tables, std::string_view kind,
                                 const std::string& title) {
  using detail::cell;
  using detail::cell_number;
  PlotSpec spec;
  spec.title = title;
  std::vector<PlotSeries> series;

  if (kind == "sweep") {
    spec.log_y = true;
    spec.y_label = "BER";
    std::vector<std::string> all_values;
    for (const auto& t : tables) {
      for (const auto& r : t.rows) all_values.push_back(cell(t, r, "axis_value"));
    }
    (void)detail::axis_positions(all_values, spec.x_categories);
    for (const auto& t : tables) {
      if (t.rows.empty()) continue;
      spec.x_label = cell(t, t.rows.front(), "axis");
      std::vector<std::string> values;
      for (const auto& r : t.rows) values.push_back(cell(t, r, "axis_value"));
      auto cats = spec.x_categories;
      std::vector<double> x;
      if (spec.x_categories.empty()) {
        x = detail::axis_positions(values, cats);
      } else {
        for (const auto& v : values) {
          x.push_back(static_cast<double>(std::find(cats.begin(), cats.end(), v) - cats.begin()));
        }
      }
      PlotSeries emp{cell(t, t.rows.front(), "detector"), x, {}, false};
      PlotSeries ana{emp.name + " analytic", x, {}, true};
      bool has_analytic = false;
      for (const auto& r : t.rows) {
        emp.y.push_back(cell_number(cell(t, r, "ber")));
        ana.y.push_back(cell_number(cell(t, r, "ber_analytic")));
        has_analytic = has_analytic || std::isfinite(ana.y.back());
      }
      series.push_back(std::move(emp));
      if (has_analytic) series.push_back(std::move(ana));
    }
  } else if (kind == "roc") {
    spec.log_x = true;
    spec.log_y = true;
    spec.x_label = "P_fa";
    spec.y_label = "P_md";
    for (const auto& t : tables) {
      std::map<std::string, std::size_t> index;
      std::vector<PlotSeries> emp;
      std::vector<PlotSeries> ana;
      for (const auto& r : t.rows) {
        const std::string key = cell(t, r, "axis") + "=" + cell(t, r, "axis_value");
        auto [it, fresh] = index.emplace(key, emp.size());
        if (fresh) {
          emp.push_back({key, {}, {}, false});
          ana.push_back({key + " analytic", {}, {}, true});
        }
        const double p = cell_number(cell(t, r, "pfa_target"));
        emp[it->second].x.push_back(p);
        emp[it->second].y.push_back(cell_number(cell(t, r, "pmd_emp")));
        ana[it->second].x.push_back(p);
        ana[it->second].y.push_back(cell_number(cell(t, r, "pmd_analytic")));
      }
      for (auto& s : emp) series.push_back(std::move(s));
      for (auto& s : ana) series.push_back(std::move(s));
    }
  } else if (kind == "theory") {
    spec.log_y = true;
    spec.y_label = "probability";
    for (const auto& t : tables) {
      // x is the first of gamma_db, n, m that varies across rows
      std::string x_col = "gamma_db";
      for (const char* col : {"gamma_db", "n", "m"}) {
        std::vector<std::string> seen;
        for (const auto& r : t.rows) seen.push_back(cell(t, r, col));
        if (std::adjacent_find(seen.begin(), seen.end(), std::not_equal_to<>()) != seen.end()) {
          x_col = col;
          break;
        }
      }
      spec.x_label = x_col;
      std::vector<std::string> etas;
      for (const auto& r : t.rows) {
        if (std::find(etas.begin(), etas.end(), cell(t, r, "eta")) == etas.end()) etas.push_back(cell(t, r, "eta"));
      }
      for (const auto& eta : etas) {
        for (const char* col : {"pfa", "pmd_avg", "ber"}) {
          PlotSeries s{std::string(col) + (etas.size() > 1 ? " eta=" + eta : ""), {}, {}, false};
          for (const auto& r : t.rows) {
            if (cell(t, r, "eta") != eta) continue;
            s.x.push_back(cell_number(cell(t, r, x_col)));
            s.y.push_back(cell_number(cell(t, r, col)));
          }
          series.push_back(std::move(s));
        }
      }
      PlotSeries lb{"ber_lower_bound", {}, {}, true};
      for (const auto& r : t.rows) {
        if (cell(t, r, "eta") != etas.front()) continue;
        lb.x.push_back(cell_number(cell(t, r, x_col)));
        lb.y.push_back(cell_number(cell(t, r, "ber_lower_bound")));
      }
      series.push_back(std::move(lb));
    }
  } else {
    throw ConfigError("unknown plot kind '" + std::string(kind) + "'");
  }
  return render_svg(spec, series);
}

}  // namespace ambc
