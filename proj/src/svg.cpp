#include "casl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "casl/error.hpp"

namespace casl {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 24, kTop = 40, kBottom = 56;

std::string fixed2(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

// Tick step of the form {1, 2, 5} * 10^k giving 4-8 ticks over the span.
double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_line_chart(const SvgChart& chart) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const SvgSeries& s : chart.series)
    for (auto [x, y] : s.points) {
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!any) throw ValidationError("svg: no data points to plot");
  if (chart.hline) {
    ymin = std::min(ymin, *chart.hline);
    ymax = std::max(ymax, *chart.hline);
  }
  if (xmax == xmin) xmax = xmin + 1;
  const double ypad = ymax == ymin ? 0.05 : (ymax - ymin) * 0.08;
  ymin -= ypad;
  ymax += ypad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << escape(chart.title)
      << "</text>\n";

  // Axes and ticks.
  out << "<g stroke=\"#333\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h << "\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  const double xstep = nice_step(xmax - xmin);
  for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-9; t += xstep) {
    const double px = sx(t);
    out << "<line x1=\"" << fixed2(px) << "\" y1=\"" << kTop + plot_h
        << "\" x2=\"" << fixed2(px) << "\" y2=\"" << kTop + plot_h + 5
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << fixed2(px) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << fixed2(t) << "</text>\n";
  }
  const double ystep = nice_step(ymax - ymin);
  for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-9; t += ystep) {
    const double py = sy(t);
    out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << fixed2(py) << "\" x2=\""
        << kLeft << "\" y2=\"" << fixed2(py) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed2(py + 4)
        << "\" text-anchor=\"end\">" << fixed2(t) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(chart.x_label)
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">" << escape(chart.y_label) << "</text>\n";
  out << "</g>\n";

  if (chart.hline) {
    const double py = sy(*chart.hline);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << fixed2(py) << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << fixed2(py)
        << "\" stroke=\"#2ca02c\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  }

  for (const SvgSeries& s : chart.series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << " points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) out << " ";
      out << fixed2(sx(s.points[i].first)) << "," << fixed2(sy(s.points[i].second));
    }
    out << "\"/>\n";
    for (auto [x, y] : s.points)
      out << "<circle cx=\"" << fixed2(sx(x)) << "\" cy=\"" << fixed2(sy(y))
          << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
  }

  // Legend, top-right inside the plot area.
  double ly = kTop + 10;
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const SvgSeries& s : chart.series) {
    const double lx = kLeft + plot_w - 150;
    out << "<line x1=\"" << lx << "\" y1=\"" << fixed2(ly - 4) << "\" x2=\""
        << lx + 24 << "\" y2=\"" << fixed2(ly - 4) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << "/>\n<text x=\"" << lx + 30 << "\" y=\"" << fixed2(ly) << "\">"
        << escape(s.label) << "</text>\n";
    ly += 18;
  }
  if (chart.hline) {
    const double lx = kLeft + plot_w - 150;
    out << "<line x1=\"" << lx << "\" y1=\"" << fixed2(ly - 4) << "\" x2=\""
        << lx + 24 << "\" y2=\"" << fixed2(ly - 4)
        << "\" stroke=\"#2ca02c\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    out << "<text x=\"" << lx + 30 << "\" y=\"" << fixed2(ly) << "\">"
        << escape(chart.hline_label) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void write_line_chart(const SvgChart& chart, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("svg: cannot open for writing: " + path);
  out << render_line_chart(chart);
  if (!out) throw IoError("svg: write failed: " + path);
}

}  // namespace casl
