#include "geodesy/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "geodesy/error.hpp"

namespace geodesy {

namespace {

constexpr double kWidth = 760, kHeight = 480;
constexpr double kLeft = 80, kRight = 200, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string esc(const std::string& s) {
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

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;
  double px0 = 0, px1 = 1;

  double map(double v) const {
    const double t = log ? std::log10(v) : v;
    return px0 + (t - lo) / (hi - lo) * (px1 - px0);
  }
};

Axis make_axis(std::vector<double> values, bool log, double px0, double px1) {
  Axis a;
  a.log = log;
  a.px0 = px0;
  a.px1 = px1;
  std::vector<double> t;
  for (double v : values) {
    if (!std::isfinite(v) || (log && v <= 0.0)) continue;
    t.push_back(log ? std::log10(v) : v);
  }
  if (t.empty()) return a;
  a.lo = *std::min_element(t.begin(), t.end());
  a.hi = *std::max_element(t.begin(), t.end());
  const double pad = a.hi > a.lo ? 0.05 * (a.hi - a.lo) : (a.lo == 0.0 ? 1.0 : 0.1 * std::abs(a.lo));
  a.lo -= pad;
  a.hi += pad;
  return a;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) invalid_input("cannot write " + path);
  out << text;
}

std::string join(const std::string& dir, const std::string& file) { return (std::filesystem::path(dir) / file).string(); }

void emit(const std::string& path, const PlotSpec& spec, const std::vector<RibbonSeries>& series, std::vector<std::string>& written) {
  const std::string svg = render_svg(spec, series);
  if (svg.empty()) {
    std::clog << "plot " << path << " skipped: no data\n";
    return;
  }
  write_file(path, svg);
  written.push_back(path);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

RibbonSeries summarize(const std::string& name, const std::vector<std::pair<double, double>>& samples) {
  std::map<double, std::vector<double>> groups;
  for (const auto& [x, y] : samples) {
    if (std::isfinite(x) && std::isfinite(y)) groups[x].push_back(y);
  }
  RibbonSeries s;
  s.name = name;
  for (const auto& [x, ys] : groups) s.points.push_back({x, quantile(ys, 0.5), quantile(ys, 0.25), quantile(ys, 0.75)});
  return s;
}

std::vector<double> nice_ticks(double lo, double hi, int count) {
  std::vector<double> ticks;
  if (!(hi > lo) || count < 1) {
    ticks.push_back(lo);
    return ticks;
  }
  const double raw = (hi - lo) / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

std::string render_svg(const PlotSpec& spec, const std::vector<RibbonSeries>& series) {
  std::vector<const RibbonSeries*> kept;
  for (const auto& s : series) {
    if (s.points.empty()) {
      std::clog << "series '" << s.name << "' is empty, skipped\n";
      continue;
    }
    kept.push_back(&s);
  }
  if (kept.empty()) return {};

  std::vector<double> xs, ys;
  for (const auto* s : kept) {
    for (const auto& p : s->points) {
      xs.push_back(p.x);
      ys.insert(ys.end(), {p.median, p.q1, p.q3});
    }
  }
  const Axis ax = make_axis(xs, spec.log_x, kLeft, kWidth - kRight);
  const Axis ay = make_axis(ys, spec.log_y, kHeight - kBottom, kTop);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(spec.title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : nice_ticks(ax.lo, ax.hi, 6)) {
    const double v = ax.log ? std::pow(10.0, t) : t;
    const double px = ax.map(v);
    svg << "<line x1=\"" << px << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << px << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << px << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">" << num(v) << "</text>\n";
  }
  for (double t : nice_ticks(ay.lo, ay.hi, 6)) {
    const double v = ay.log ? std::pow(10.0, t) : t;
    const double py = ay.map(v);
    svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\"" << py << "\" stroke=\"black\"/>";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">" << esc(spec.x_label)
      << (spec.log_x ? " (log)" : "") << "</text>\n";
  svg << "<text transform=\"translate(20," << (kTop + kHeight - kBottom) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << esc(spec.y_label)
      << (spec.log_y ? " (log)" : "") << "</text>\n";

  for (std::size_t s = 0; s < kept.size(); ++s) {
    const char* colour = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
    const auto& pts = kept[s]->points;
    auto valid = [&](double x, double y) { return (!ax.log || x > 0.0) && (!ay.log || y > 0.0); };
    std::ostringstream ribbon, line, dots;
    bool any = false;
    for (const auto& p : pts) {
      if (!valid(p.x, p.q1) || !valid(p.x, p.q3)) continue;
      ribbon << ax.map(p.x) << ',' << ay.map(p.q1) << ' ';
      any = true;
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      if (!valid(it->x, it->q1) || !valid(it->x, it->q3)) continue;
      ribbon << ax.map(it->x) << ',' << ay.map(it->q3) << ' ';
    }
    for (const auto& p : pts) {
      if (!valid(p.x, p.median)) continue;
      line << ax.map(p.x) << ',' << ay.map(p.median) << ' ';
      dots << "<circle cx=\"" << ax.map(p.x) << "\" cy=\"" << ay.map(p.median) << "\" r=\"3\" fill=\"" << colour << "\"/>";
    }
    if (any) svg << "<polygon points=\"" << ribbon.str() << "\" fill=\"" << colour << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n" << dots.str() << "\n";

    const double ly = kTop + 10 + 20.0 * static_cast<double>(s);
    const double lx = kWidth - kRight + 15;
    std::string label = kept[s]->name;
    if (spec.show_slope && std::isfinite(kept[s]->slope)) label += " (slope " + num(kept[s]->slope) + ")";
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 20 << "\" y2=\"" << ly << "\" stroke=\"" << colour
        << "\" stroke-width=\"3\"/><text x=\"" << lx + 26 << "\" y=\"" << ly + 4 << "\">" << esc(label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> emit_plots(const DistanceExperiment& exp, const std::string& dir) {
  std::vector<std::string> written;
  std::map<std::string, std::vector<std::pair<double, double>>> by_n, by_eps;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> raw;
  std::string surface;
  for (const auto& r : exp.rows) {
    if (!r.ok()) continue;
    surface = r.surface;
    const std::string name = r.method == "mesh" ? std::string("mesh") : "graph r=" + num(r.radius);
    by_n[name].emplace_back(static_cast<double>(r.n), r.mean_rel_error);
    by_eps[name].emplace_back(r.eps_hat, r.mean_rel_error);
    raw[name].first.push_back(r.eps_hat);
    raw[name].second.push_back(r.mean_rel_error);
  }
  std::vector<RibbonSeries> vs_n, vs_eps;
  for (const auto& [name, samples] : by_n) vs_n.push_back(summarize(name, samples));
  for (const auto& [name, samples] : by_eps) {
    RibbonSeries s = summarize(name, samples);
    s.slope = loglog_slope(raw[name].first, raw[name].second);
    vs_eps.push_back(std::move(s));
  }
  emit(join(dir, "distance_error_vs_n.svg"), {"Mean relative error, " + surface, "sample size n", "mean relative error", true, true, false}, vs_n,
       written);
  emit(join(dir, "distance_error_vs_eps.svg"), {"Error against resolution, " + surface, "eps_hat", "mean relative error", true, true, true}, vs_eps,
       written);
  return written;
}

std::vector<std::string> emit_plots(const IsomapExperiment& exp, const std::string& dir) {
  std::vector<std::string> written;
  std::vector<std::pair<double, double>> iso, mesh;
  std::vector<double> radii;
  std::string surface;
  for (const auto& r : exp.rows) {
    if (r.method == "isomap") radii.push_back(r.radius);
    if (!r.ok()) continue;
    surface = r.surface;
    if (r.method == "isomap") iso.emplace_back(r.radius, r.rmse);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  for (const auto& r : exp.rows) {
    if (r.ok() && r.method == "mesh_isomap") {
      for (double x : radii) mesh.emplace_back(x, r.rmse);
    }
  }
  emit(join(dir, "isomap_rmse_vs_radius.svg"), {"Procrustes error, " + surface, "connectivity radius r", "rmse", false, false, false},
       {summarize("isomap", iso), summarize("mesh isomap", mesh)}, written);
  return written;
}

std::vector<std::string> emit_plots(const LowerBoundExperiment& exp, const std::string& dir) {
  std::vector<std::string> written;
  std::vector<std::pair<double, double>> ratio, gap, c1;
  for (const auto& r : exp.rows) {
    ratio.emplace_back(r.m, r.k == 1 ? r.ratio_median : r.beta_ratio_median);
    gap.emplace_back(r.m, r.gap_ratio);
    c1.emplace_back(r.m, r.c1);
  }
  emit(join(dir, "lowerbound_ratio.svg"), {"Distance gap (d2 - d1) / (eps^2 d1)", "grid size m", "ratio", false, false, false},
       {summarize("measured", ratio), summarize("C1", c1)}, written);
  emit(join(dir, "lowerbound_embedding_gap.svg"), {"Embedding gap / eps^2", "grid size m", "ratio", false, false, false},
       {summarize("rms |u1 - u2| / eps^2", gap)}, written);
  return written;
}

}  // namespace geodesy
