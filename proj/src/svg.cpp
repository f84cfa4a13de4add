#include "amlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace amlab {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

double axis_value(double v, bool log_axis) {
  if (!log_axis) return v;
  if (!(v > 0.0)) {
    throw std::invalid_argument("emit_plot: log axis needs positive values");
  }
  return std::log10(v);
}

}  // namespace

void emit_plot(const std::vector<PlotSeries>& series, const std::string& path,
               const PlotOptions& options) {
  if (series.empty()) throw std::invalid_argument("emit_plot: no series");
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      throw std::invalid_argument("emit_plot: series must be non-empty, equal length");
    }
  }

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double xv = axis_value(s.x[i], options.log_x);
      const double yv = axis_value(s.y[i], options.log_y);
      x_min = std::min(x_min, xv);
      x_max = std::max(x_max, xv);
      y_min = std::min(y_min, yv);
      y_max = std::max(y_max, yv);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;

  const double margin = 60.0;
  const double w = options.width, h = options.height;
  const auto px = [&](double xv) {
    return margin + (xv - x_min) / (x_max - x_min) * (w - 2 * margin);
  };
  const auto py = [&](double yv) {
    return h - margin - (yv - y_min) / (y_max - y_min) * (h - 2 * margin);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << h - margin << "\" x2=\""
      << w - margin << "\" y2=\"" << h - margin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << h - margin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  if (!options.title.empty()) {
    out << "<text x=\"" << w / 2 << "\" y=\"25\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << options.title
        << "</text>\n";
  }
  // axis extremes
  out << "<text x=\"" << margin << "\" y=\"" << h - margin + 18
      << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << (options.log_x ? "1e" : "") << x_min << "</text>\n";
  out << "<text x=\"" << w - margin << "\" y=\"" << h - margin + 18
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << (options.log_x ? "1e" : "") << x_max << "</text>\n";
  out << "<text x=\"" << margin - 6 << "\" y=\"" << h - margin
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << (options.log_y ? "1e" : "") << y_min << "</text>\n";
  out << "<text x=\"" << margin - 6 << "\" y=\"" << margin
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << (options.log_y ? "1e" : "") << y_max << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
    out << "<path fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" d=\"";
    // thin long series to at most ~4000 points
    const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 4000);
    bool first = true;
    std::size_t min_idx = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (s.y[i] < s.y[min_idx]) min_idx = i;
      if (i % stride != 0 && i != s.x.size() - 1) continue;
      const double xv = px(axis_value(s.x[i], options.log_x));
      const double yv = py(axis_value(s.y[i], options.log_y));
      out << (first ? 'M' : 'L') << xv << ' ' << yv << ' ';
      first = false;
    }
    out << "\"/>\n";
    if (options.mark_minimum) {
      const double xv = px(axis_value(s.x[min_idx], options.log_x));
      const double yv = py(axis_value(s.y[min_idx], options.log_y));
      out << "<circle cx=\"" << xv << "\" cy=\"" << yv
          << "\" r=\"4\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
      char xbuf[40];
      std::snprintf(xbuf, sizeof(xbuf), "%.12g", s.x[min_idx]);
      out << "<!-- minimum name=\"" << s.name << "\" x=\"" << xbuf
          << "\" -->\n";
    }
    out << "<text x=\"" << w - margin - 8 << "\" y=\""
        << margin + 16.0 * static_cast<double>(si + 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
        << "fill=\"" << color << "\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace amlab
