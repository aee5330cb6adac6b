#pragma once

#include <string>
#include <vector>

#include "palzone/experiments.hpp"

namespace palzone {

/// Fixed-format number for CSV/SVG output: "%.<digits>f", with "inf", "-inf" and "nan" spelled out.
std::string fixed(double v, int digits = 6);

std::string convergence_csv(const std::vector<ConvergenceRun>& runs);
std::string contrast_table_csv(const std::vector<Design>& designs);
/// "# nx=.. nz=.. frequency_hz=.. array_kind=.." then x_m,z_m,spl_db per render cell.
std::string field_csv(const FieldMap& map);
std::string field_summary_csv(const std::vector<FieldMap>& maps);
std::string robustness_csv(const std::vector<SweepCell>& cells);
std::string robustness_summary_csv(const std::vector<SweepCell>& cells);

/// Viridis colour for t in [0, 1] as "#rrggbb".
std::string viridis(double t);

/// SPL heatmap with z upward, a dB colour bar spanning [max - range_db, max],
/// and outlined bright (white) and dark (black) zones.
std::string heatmap_svg(const FieldMap& map, const Zone& bright, const Zone& dark, double range_db = 60.0);

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
  bool dashed = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

std::string line_plot_svg(const LinePlot& plot);

}  // namespace palzone
