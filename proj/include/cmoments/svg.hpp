#pragma once

// Self-contained SVG figures (inline styles, no external assets): a cell
// heatmap and a multi-series line chart.  Output is deterministic text.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmoments {

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Blue (low) -> yellow (mid) -> red (high) over [0, 1].
inline std::string heat_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  int r, g, b;
  if (v < 0.5) {
    const double t = v / 0.5;
    r = static_cast<int>(40 + t * (250 - 40));
    g = static_cast<int>(80 + t * (220 - 80));
    b = static_cast<int>(200 - t * (200 - 60));
  } else {
    const double t = (v - 0.5) / 0.5;
    r = 250;
    g = static_cast<int>(220 - t * (220 - 40));
    b = static_cast<int>(60 - t * 30);
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace detail

/// Heatmap over an (x, y) grid of cells.  NaN cells render gray.
inline void write_heatmap_svg(const std::string& path, const std::string& title,
                              const std::vector<double>& xs,
                              const std::vector<double>& ys,
                              const std::vector<std::vector<double>>& cell,
                              const std::string& x_label,
                              const std::string& y_label) {
  const std::size_t nx = xs.size(), ny = ys.size();
  if (cell.size() != nx) throw std::invalid_argument("write_heatmap_svg: shape mismatch");
  const double cw = 14.0, ch = 14.0;
  const double left = 70.0, top = 40.0, bottom = 50.0, right = 90.0;
  const double width = left + nx * cw + right;
  const double height = top + ny * ch + bottom;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_heatmap_svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::svg_num(width)
      << "\" height=\"" << detail::svg_num(height) << "\" font-family=\"monospace\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << detail::svg_num(left) << "\" y=\"20\">" << title << "</text>\n";

  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double v = cell[i][j];
      const std::string fill = std::isnan(v) ? "#d9d9d9" : detail::heat_color(v);
      const double px = left + i * cw;
      // y axis grows upward
      const double py = top + (ny - 1 - j) * ch;
      out << "<rect x=\"" << detail::svg_num(px) << "\" y=\"" << detail::svg_num(py)
          << "\" width=\"" << detail::svg_num(cw) << "\" height=\"" << detail::svg_num(ch)
          << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  // sparse tick labels
  const std::size_t stride_x = std::max<std::size_t>(1, nx / 6);
  for (std::size_t i = 0; i < nx; i += stride_x)
    out << "<text x=\"" << detail::svg_num(left + i * cw) << "\" y=\""
        << detail::svg_num(top + ny * ch + 16) << "\">" << detail::svg_num(xs[i])
        << "</text>\n";
  const std::size_t stride_y = std::max<std::size_t>(1, ny / 6);
  for (std::size_t j = 0; j < ny; j += stride_y)
    out << "<text x=\"" << detail::svg_num(left - 42) << "\" y=\""
        << detail::svg_num(top + (ny - 1 - j) * ch + 11) << "\">" << detail::svg_num(ys[j])
        << "</text>\n";
  out << "<text x=\"" << detail::svg_num(left + nx * cw * 0.5) << "\" y=\""
      << detail::svg_num(height - 12) << "\">" << x_label << "</text>\n";
  out << "<text x=\"12\" y=\"" << detail::svg_num(top + ny * ch * 0.5) << "\">" << y_label
      << "</text>\n";
  // color legend
  for (int s = 0; s <= 10; ++s) {
    const double v = s / 10.0;
    out << "<rect x=\"" << detail::svg_num(left + nx * cw + 20) << "\" y=\""
        << detail::svg_num(top + (10 - s) * 12) << "\" width=\"12\" height=\"12\" fill=\""
        << detail::heat_color(v) << "\"/>\n";
    if (s % 5 == 0)
      out << "<text x=\"" << detail::svg_num(left + nx * cw + 36) << "\" y=\""
          << detail::svg_num(top + (10 - s) * 12 + 11) << "\">" << detail::svg_num(v)
          << "</text>\n";
  }
  out << "</svg>\n";
}

struct LineSeries {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart with shared axes; points with NaN y are skipped.
inline void write_line_chart_svg(const std::string& path, const std::string& title,
                                 const std::vector<LineSeries>& series,
                                 const std::string& x_label,
                                 const std::string& y_label) {
  const double width = 560, height = 360;
  const double left = 70, top = 40, plot_w = width - left - 40, plot_h = height - top - 70;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i])) continue;
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  if (xmax == xmin) xmax = xmin + 1;
  ymin = std::min(ymin, 0.0);
  if (ymax == ymin) ymax = ymin + 1;

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return top + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_line_chart_svg: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"monospace\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"20\">" << title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double tx = xmin + (xmax - xmin) * tick / 4.0;
    const double ty = ymin + (ymax - ymin) * tick / 4.0;
    out << "<text x=\"" << detail::svg_num(px(tx) - 10) << "\" y=\""
        << detail::svg_num(top + plot_h + 16) << "\">" << detail::svg_num(tx) << "</text>\n";
    out << "<text x=\"" << detail::svg_num(left - 55) << "\" y=\""
        << detail::svg_num(py(ty) + 4) << "\">" << detail::svg_num(ty) << "</text>\n";
  }
  int legend_row = 0;
  for (const auto& s : series) {
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i])) continue;
      points += detail::svg_num(px(s.x[i]));
      points += ',';
      points += detail::svg_num(py(s.y[i]));
      points += ' ';
    }
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\""
        << points << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isnan(s.y[i])) continue;
      out << "<circle cx=\"" << detail::svg_num(px(s.x[i])) << "\" cy=\""
          << detail::svg_num(py(s.y[i])) << "\" r=\"2.4\" fill=\"" << s.color << "\"/>\n";
    }
    out << "<text x=\"" << left + plot_w - 160 << "\" y=\"" << top + 14 + 14 * legend_row
        << "\" fill=\"" << s.color << "\">" << s.name << "</text>\n";
    ++legend_row;
  }
  out << "<text x=\"" << left + plot_w * 0.5 << "\" y=\"" << height - 14 << "\">" << x_label
      << "</text>\n";
  out << "<text x=\"12\" y=\"" << top - 10 << "\">" << y_label << "</text>\n";
  out << "</svg>\n";
}

}  // namespace cmoments
