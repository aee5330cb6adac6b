#include "palzone/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace palzone {

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos) s = std::string(buf[0] == '-' ? buf + 1 : buf);  // no "-0.000"
  return s;
}

namespace {

std::string hz(double f) { return fixed(f, 3); }

// Round-number ticks (1, 2 or 5 times a power of ten) inside [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {2.0, 5.0, 10.0})
    if (raw / step > 1.5) step = m * mag;
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string convergence_csv(const std::vector<ConvergenceRun>& runs) {
  std::ostringstream os;
  os << "frequency_hz,iteration,contrast_db\n";
  for (const auto& r : runs)
    for (std::size_t i = 0; i < r.history.size(); ++i) os << hz(r.f_audio) << ',' << i + 1 << ',' << fixed(r.history[i]) << '\n';
  return os.str();
}

std::string contrast_table_csv(const std::vector<Design>& designs) {
  std::ostringstream os;
  os << "frequency_hz,array_kind,contrast_db\n";
  for (const auto& d : designs) {
    os << hz(d.f_audio) << ",PAL," << fixed(d.pal_contrast_db) << '\n';
    os << hz(d.f_audio) << ",EDL," << fixed(d.edl_contrast_db) << '\n';
  }
  return os.str();
}

std::string field_csv(const FieldMap& map) {
  std::ostringstream os;
  const auto nx = map.grid.cells_x();
  const auto nz = map.grid.cells_z();
  os << "# nx=" << nx << " nz=" << nz << " frequency_hz=" << hz(map.f_audio) << " array_kind=" << to_string(map.kind)
     << '\n';
  os << "x_m,z_m,spl_db\n";
  const auto pts = map.grid.points();
  for (std::size_t i = 0; i < pts.size(); ++i)
    os << fixed(pts[i].x, 5) << ',' << fixed(pts[i].z, 5) << ',' << fixed(map.spl_db[i], 4) << '\n';
  return os.str();
}

std::string field_summary_csv(const std::vector<FieldMap>& maps) {
  std::ostringstream os;
  os << "frequency_hz,array_kind,bright_mean_spl_db,dark_mean_spl_db,contrast_db\n";
  for (const auto& m : maps)
    os << hz(m.f_audio) << ',' << to_string(m.kind) << ',' << fixed(m.bright_mean_db, 4) << ','
       << fixed(m.dark_mean_db, 4) << ',' << fixed(m.contrast_db) << '\n';
  return os.str();
}

std::string robustness_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << "frequency_hz,snr_db,phase_range_deg,trial,array_kind,contrast_db\n";
  for (const auto& c : cells)
    for (const RobustnessSummary* s : {&c.pal, &c.edl}) {
      const char* kind = s == &c.pal ? "PAL" : "EDL";
      for (std::size_t t = 0; t < s->contrasts.size(); ++t)
        os << hz(c.f_audio) << ',' << fixed(c.cell.snr_db, 3) << ',' << fixed(c.cell.phase_range_deg, 3) << ',' << t
           << ',' << kind << ',' << fixed(s->contrasts[t]) << '\n';
    }
  return os.str();
}

std::string robustness_summary_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << "frequency_hz,snr_db,phase_range_deg,array_kind,n_trials,failures,mean_db,std_db,min_db,max_db\n";
  for (const auto& c : cells)
    for (const RobustnessSummary* s : {&c.pal, &c.edl})
      os << hz(c.f_audio) << ',' << fixed(c.cell.snr_db, 3) << ',' << fixed(c.cell.phase_range_deg, 3) << ','
         << (s == &c.pal ? "PAL" : "EDL") << ',' << s->contrasts.size() << ',' << s->failures << ',' << fixed(s->mean)
         << ',' << fixed(s->stddev) << ',' << fixed(s->min) << ',' << fixed(s->max) << '\n';
  return os.str();
}

std::string viridis(double t) {
  // Samples of matplotlib's viridis at t = 0, 1/8, ..., 1.
  static constexpr std::array<std::array<double, 3>, 9> kAnchors{{
      {0.267004, 0.004874, 0.329415},
      {0.277018, 0.185228, 0.489898},
      {0.229739, 0.322361, 0.545706},
      {0.172719, 0.448791, 0.557885},
      {0.127568, 0.566949, 0.550556},
      {0.157851, 0.683765, 0.501686},
      {0.369214, 0.788888, 0.382914},
      {0.678489, 0.863742, 0.189503},
      {0.993248, 0.906157, 0.143936},
  }};
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0) * 8.0;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), 7);
  const double f = t - static_cast<double>(i);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(255.0 * (kAnchors[i][c] * (1.0 - f) + kAnchors[i + 1][c] * f)));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string heatmap_svg(const FieldMap& map, const Zone& bright, const Zone& dark, double range_db) {
  const auto& g = map.grid;
  const std::size_t nx = g.cells_x();
  const std::size_t nz = g.cells_z();
  const double top = *std::max_element(map.spl_db.begin(), map.spl_db.end());
  const double bottom = top - range_db;
  constexpr int kLevels = 128;

  const double plot_w = 600.0;
  const double plot_h = plot_w * (g.z_max - g.z_min) / (g.x_max - g.x_min);
  const double left = 70.0;
  const double top_margin = 40.0;
  const double sx = plot_w / (g.x_max - g.x_min);
  const double sz = plot_h / (g.z_max - g.z_min);
  auto px = [&](double x) { return left + (x - g.x_min) * sx; };
  auto pz = [&](double z) { return top_margin + (g.z_max - z) * sz; };
  auto level = [&](double v) {
    const double t = (v - bottom) / range_db;
    return std::clamp(static_cast<int>(std::floor(t * kLevels)), 0, kLevels - 1);
  };

  std::ostringstream os;
  const double width = left + plot_w + 110.0;
  const double height = top_margin + plot_h + 60.0;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(left + plot_w / 2, 1) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << to_string(map.kind) << " array, " << fixed(map.f_audio / 1000.0, 1) << " kHz, contrast "
     << fixed(map.contrast_db, 1) << " dB</text>\n";

  // One rect per run of equal colour level along x.
  os << "<g shape-rendering=\"crispEdges\">\n";
  const double cw = g.step * sx;
  const double ch = g.step * sz;
  for (std::size_t iz = 0; iz < nz; ++iz) {
    const double zc = g.z_min + (static_cast<double>(iz) + 0.5) * g.step;
    std::size_t ix = 0;
    while (ix < nx) {
      const int lv = level(map.spl_db[iz * nx + ix]);
      std::size_t end = ix + 1;
      while (end < nx && level(map.spl_db[iz * nx + end]) == lv) ++end;
      const double x0 = px(g.x_min + static_cast<double>(ix) * g.step);
      os << "<rect x=\"" << fixed(x0, 2) << "\" y=\"" << fixed(pz(zc) - ch / 2, 2) << "\" width=\""
         << fixed(cw * static_cast<double>(end - ix) + 0.01, 2) << "\" height=\"" << fixed(ch + 0.01, 2) << "\" fill=\""
         << viridis((lv + 0.5) / kLevels) << "\"/>\n";
      ix = end;
    }
  }
  os << "</g>\n";

  auto zone_rect = [&](const Zone& z, const char* colour) {
    os << "<rect x=\"" << fixed(px(z.x_min), 2) << "\" y=\"" << fixed(pz(z.z_max), 2) << "\" width=\""
       << fixed((z.x_max - z.x_min) * sx, 2) << "\" height=\"" << fixed((z.z_max - z.z_min) * sz, 2)
       << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
  };
  zone_rect(bright, "white");
  zone_rect(dark, "black");

  // Axes.
  os << "<rect x=\"" << fixed(left, 2) << "\" y=\"" << fixed(top_margin, 2) << "\" width=\"" << fixed(plot_w, 2)
     << "\" height=\"" << fixed(plot_h, 2) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = g.x_min + (g.x_max - g.x_min) * i / 4.0;
    os << "<text x=\"" << fixed(px(x), 2) << "\" y=\"" << fixed(top_margin + plot_h + 16, 2)
       << "\" text-anchor=\"middle\">" << fixed(x, 2) << "</text>\n";
    const double z = g.z_min + (g.z_max - g.z_min) * i / 4.0;
    os << "<text x=\"" << fixed(left - 6, 2) << "\" y=\"" << fixed(pz(z) + 4, 2) << "\" text-anchor=\"end\">"
       << fixed(z, 2) << "</text>\n";
  }
  os << "<text x=\"" << fixed(left + plot_w / 2, 2) << "\" y=\"" << fixed(top_margin + plot_h + 36, 2)
     << "\" text-anchor=\"middle\">x (m)</text>\n";
  os << "<text x=\"20\" y=\"" << fixed(top_margin + plot_h / 2, 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << fixed(top_margin + plot_h / 2, 2) << ")\">z (m)</text>\n";

  // Colour bar.
  const double bx = left + plot_w + 20.0;
  const double bw = 18.0;
  for (int i = 0; i < kLevels; ++i) {
    const double y0 = top_margin + plot_h * (1.0 - (i + 1.0) / kLevels);
    os << "<rect x=\"" << fixed(bx, 2) << "\" y=\"" << fixed(y0, 2) << "\" width=\"" << fixed(bw, 2) << "\" height=\""
       << fixed(plot_h / kLevels + 0.01, 2) << "\" fill=\"" << viridis((i + 0.5) / kLevels) << "\"/>\n";
  }
  os << "<rect x=\"" << fixed(bx, 2) << "\" y=\"" << fixed(top_margin, 2) << "\" width=\"" << fixed(bw, 2)
     << "\" height=\"" << fixed(plot_h, 2) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 6; ++i) {
    const double v = bottom + range_db * i / 6.0;
    const double y = top_margin + plot_h * (1.0 - i / 6.0);
    os << "<text x=\"" << fixed(bx + bw + 4, 2) << "\" y=\"" << fixed(y + 4, 2) << "\">" << fixed(v, 0) << "</text>\n";
  }
  os << "<text x=\"" << fixed(bx, 2) << "\" y=\"" << fixed(top_margin - 8, 2) << "\">SPL (dB)</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string line_plot_svg(const LinePlot& plot) {
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      const double e = i < s.err.size() && std::isfinite(s.err[i]) ? s.err[i] : 0.0;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i] - e);
      ymax = std::max(ymax, s.y[i] + e);
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double left = 70, right = 160, top = 40, bottom = 50, w = 520, h = 340;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * w; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(left + w + right, 0) << "\" height=\""
     << fixed(top + h + bottom, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(left + w / 2, 1) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(plot.title) << "</text>\n";
  os << "<rect x=\"" << fixed(left, 1) << "\" y=\"" << fixed(top, 1) << "\" width=\"" << fixed(w, 1) << "\" height=\""
     << fixed(h, 1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double x : nice_ticks(xmin, xmax)) {
    os << "<line x1=\"" << fixed(px(x), 1) << "\" y1=\"" << fixed(top, 1) << "\" x2=\"" << fixed(px(x), 1)
       << "\" y2=\"" << fixed(top + h, 1) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fixed(px(x), 1) << "\" y=\"" << fixed(top + h + 16, 1) << "\" text-anchor=\"middle\">"
       << tick_label(x) << "</text>\n";
  }
  for (double y : nice_ticks(ymin, ymax)) {
    os << "<line x1=\"" << fixed(left, 1) << "\" y1=\"" << fixed(py(y), 1) << "\" x2=\"" << fixed(left + w, 1)
       << "\" y2=\"" << fixed(py(y), 1) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fixed(left - 6, 1) << "\" y=\"" << fixed(py(y) + 4, 1) << "\" text-anchor=\"end\">"
       << tick_label(y) << "</text>\n";
  }
  os << "<text x=\"" << fixed(left + w / 2, 1) << "\" y=\"" << fixed(top + h + 38, 1) << "\" text-anchor=\"middle\">"
     << escape(plot.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << fixed(top + h / 2, 1) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << fixed(top + h / 2, 1) << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\""
       << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      os << (first ? "" : " ") << fixed(px(s.x[i]), 2) << ',' << fixed(py(s.y[i]), 2);
      first = false;
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.err.size() && i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || !std::isfinite(s.err[i])) continue;
      const double x = px(s.x[i]);
      os << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << fixed(py(s.y[i] - s.err[i]), 2) << "\" x2=\"" << fixed(x, 2)
         << "\" y2=\"" << fixed(py(s.y[i] + s.err[i]), 2) << "\" stroke=\"" << s.color << "\"/>\n";
      os << "<circle cx=\"" << fixed(x, 2) << "\" cy=\"" << fixed(py(s.y[i]), 2) << "\" r=\"2.5\" fill=\"" << s.color
         << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    os << "<line x1=\"" << fixed(left + w + 12, 1) << "\" y1=\"" << fixed(ly - 4, 1) << "\" x2=\""
       << fixed(left + w + 36, 1) << "\" y2=\"" << fixed(ly - 4, 1) << "\" stroke=\"" << s.color
       << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6 3\"" : "") << "/>\n";
    os << "<text x=\"" << fixed(left + w + 42, 1) << "\" y=\"" << fixed(ly, 1) << "\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace palzone
