#pragma once

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "bellsim/montecarlo.hpp"

namespace bellsim {

/// One curve to draw, with the stroke color of its polyline.
struct PlotSeries {
  std::string color = "#1f77b4";
  const CorrelationCurve* curve = nullptr;
};

namespace detail {

inline std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

inline std::string fmt_axis(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace detail

/// Renders a self-contained SVG line plot of correlation against beta.
/// Layout is fixed: 800x500 viewBox, y spanning [-1.05, 1.05], horizontal
/// reference lines at -1, 0 and +1, one polyline per series. The output is
/// deterministic for a given input.
inline std::string render_curve_svg(std::span<const PlotSeries> series) {
  constexpr double width = 800.0;
  constexpr double height = 500.0;
  constexpr double margin_left = 60.0;
  constexpr double margin_right = 20.0;
  constexpr double margin_top = 20.0;
  constexpr double margin_bottom = 45.0;
  constexpr double y_min = -1.05;
  constexpr double y_max = 1.05;

  double x_min = 0.0;
  double x_max = 1.0;
  bool have_x = false;
  for (const PlotSeries& s : series) {
    if (s.curve == nullptr) {
      continue;
    }
    for (const CurvePoint& p : s.curve->points) {
      if (!have_x) {
        x_min = x_max = p.beta;
        have_x = true;
      } else {
        x_min = std::min(x_min, p.beta);
        x_max = std::max(x_max, p.beta);
      }
    }
  }
  if (!have_x || x_max == x_min) {
    x_max = x_min + 1.0;
  }

  const double plot_w = width - margin_left - margin_right;
  const double plot_h = height - margin_top - margin_bottom;
  const auto map_x = [&](double beta) {
    return margin_left + (beta - x_min) / (x_max - x_min) * plot_w;
  };
  const auto map_y = [&](double corr) {
    return margin_top + (y_max - corr) / (y_max - y_min) * plot_h;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\" "
         "width=\"800\" height=\"500\">\n";
  svg << "  <rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  svg << "  <rect x=\"" << detail::fmt_px(margin_left) << "\" y=\""
      << detail::fmt_px(margin_top) << "\" width=\"" << detail::fmt_px(plot_w)
      << "\" height=\"" << detail::fmt_px(plot_h)
      << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n";

  // Reference lines at corr = -1, 0, +1.
  svg << "  <g stroke=\"#555555\" stroke-width=\"1\">\n";
  for (double level : {-1.0, 0.0, 1.0}) {
    const double y = map_y(level);
    svg << "    <line x1=\"" << detail::fmt_px(margin_left) << "\" y1=\""
        << detail::fmt_px(y) << "\" x2=\""
        << detail::fmt_px(margin_left + plot_w) << "\" y2=\""
        << detail::fmt_px(y) << "\"/>\n";
  }
  svg << "  </g>\n";

  // Axis value labels.
  svg << "  <g font-family=\"sans-serif\" font-size=\"13\" fill=\"#333333\">\n";
  for (double level : {-1.0, 0.0, 1.0}) {
    svg << "    <text x=\"" << detail::fmt_px(margin_left - 8.0) << "\" y=\""
        << detail::fmt_px(map_y(level) + 4.0) << "\" text-anchor=\"end\">"
        << (level < 0 ? "-1" : level > 0 ? "1" : "0") << "</text>\n";
  }
  svg << "    <text x=\"" << detail::fmt_px(map_x(x_min)) << "\" y=\""
      << detail::fmt_px(margin_top + plot_h + 18.0)
      << "\" text-anchor=\"middle\">" << detail::fmt_axis(x_min)
      << "</text>\n";
  svg << "    <text x=\"" << detail::fmt_px(map_x(x_max)) << "\" y=\""
      << detail::fmt_px(margin_top + plot_h + 18.0)
      << "\" text-anchor=\"middle\">" << detail::fmt_axis(x_max)
      << "</text>\n";
  svg << "    <text x=\"" << detail::fmt_px(margin_left + plot_w / 2.0)
      << "\" y=\"" << detail::fmt_px(margin_top + plot_h + 36.0)
      << "\" text-anchor=\"middle\">beta (rad)</text>\n";
  svg << "  </g>\n";

  for (const PlotSeries& s : series) {
    if (s.curve == nullptr || s.curve->points.empty()) {
      continue;
    }
    svg << "  <polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const CurvePoint& p : s.curve->points) {
      if (!first) {
        svg << ' ';
      }
      first = false;
      svg << detail::fmt_px(map_x(p.beta)) << ','
          << detail::fmt_px(map_y(p.est.mean));
    }
    svg << "\"/>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

inline void write_curve_svg(std::ostream& os,
                            std::span<const PlotSeries> series) {
  os << render_curve_svg(series);
}

}  // namespace bellsim
