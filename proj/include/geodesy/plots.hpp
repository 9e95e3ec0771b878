#pragma once

// Self-contained SVG line plots with interquartile ribbons.

#include <string>
#include <utility>
#include <vector>

#include "geodesy/experiments.hpp"

namespace geodesy {

struct RibbonPoint {
  double x = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct RibbonSeries {
  std::string name;
  std::vector<RibbonPoint> points;  ///< sorted by x
  double slope = 0.0;               ///< shown in the legend when the plot fits slopes
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool show_slope = false;
};

/// Groups (x, y) samples by x and summarizes each group by its median and quartiles.
/// Non-finite samples are dropped.
RibbonSeries summarize(const std::string& name, const std::vector<std::pair<double, double>>& samples);

/// Quartile by linear interpolation between order statistics (q in [0, 1]).
double quantile(std::vector<double> values, double q);

/// Roughly `count` evenly spaced round tick values covering [lo, hi], strictly increasing.
std::vector<double> nice_ticks(double lo, double hi, int count = 5);

/// Renders the series; empty series are skipped. Returns an empty string when nothing remains.
std::string render_svg(const PlotSpec& spec, const std::vector<RibbonSeries>& series);

/// Writes the figure files for an experiment into `dir` and returns their paths.
std::vector<std::string> emit_plots(const DistanceExperiment& exp, const std::string& dir);
std::vector<std::string> emit_plots(const IsomapExperiment& exp, const std::string& dir);
std::vector<std::string> emit_plots(const LowerBoundExperiment& exp, const std::string& dir);

}  // namespace geodesy
