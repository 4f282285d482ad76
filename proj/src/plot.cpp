#include "spf/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace spf {

namespace {

constexpr double kWidth = 560, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Range {
  double lo, hi;
};

// Pads the data span by 10% and snaps to a 0.05 grid inside [0, 1].
Range axis_range(double lo, double hi) {
  const double pad = std::max(0.02, (hi - lo) * 0.1);
  lo = std::max(0.0, std::floor((lo - pad) * 20.0) / 20.0);
  hi = std::min(1.0, std::ceil((hi + pad) * 20.0) / 20.0);
  if (hi - lo < 0.05) {
    lo = std::max(0.0, lo - 0.05);
    hi = std::min(1.0, hi + 0.05);
  }
  return {lo, hi};
}

}  // namespace

std::string render_frontier_svg(const Frontier& frontier, const PlotOptions& options) {
  double pmin = 1.0, pmax = 0.0, dmin = 1.0, dmax = 0.0;
  auto extend = [&](double p, double d) {
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  };
  for (const auto& p : frontier.points) extend(p.performance, p.diversity);
  if (options.actual) {
    const auto& a = *options.actual;
    extend(a.actual.performance, a.actual.diversity);
    extend(a.actual.performance + a.performance_gain_abs, a.actual.diversity + a.diversity_gain_abs);
  }
  if (pmin > pmax) pmin = 0.0, pmax = 1.0, dmin = 0.0, dmax = 1.0;
  const Range xr = axis_range(pmin, pmax);
  const Range yr = axis_range(dmin, dmax);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x = [&](double p) { return kLeft + (p - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto y = [&](double d) { return kTop + plot_h - (d - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
       escape_xml(options.title) + "</text>\n";

  // Axes and ticks.
  s += "<g stroke=\"#333\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" +
       num(kTop + plot_h) + "\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kTop + plot_h) + "\"/>\n";
  s += "</g>\n<g fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double pv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
    const double dv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
    s += "<text x=\"" + num(x(pv)) + "\" y=\"" + num(kTop + plot_h + 18) + "\" text-anchor=\"middle\">" + num(pv) +
         "</text>\n";
    s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y(dv) + 4) + "\" text-anchor=\"end\">" + num(dv) +
         "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 16) +
       "\" text-anchor=\"middle\">Mean cohort performance</text>\n";
  s += "<text transform=\"translate(18 " + num(kTop + plot_h / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">Diversity</text>\n";
  s += "</g>\n";

  // Frontier.
  if (!frontier.points.empty()) {
    s += "<polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < frontier.points.size(); ++i) {
      if (i) s += ' ';
      s += num(x(frontier.points[i].performance)) + "," + num(y(frontier.points[i].diversity));
    }
    s += "\"/>\n<g fill=\"#2ca02c\">\n";
    for (const auto& p : frontier.points) {
      s += "<circle cx=\"" + num(x(p.performance)) + "\" cy=\"" + num(y(p.diversity)) + "\" r=\"3\"/>\n";
    }
    s += "</g>\n";
  }

  // Actual cohort with dashed guides showing the Pareto gains.
  if (options.actual) {
    const auto& a = *options.actual;
    const double ax = x(a.actual.performance), ay = y(a.actual.diversity);
    s += "<g stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"5,4\">\n";
    s += "<line class=\"gain-diversity\" x1=\"" + num(ax) + "\" y1=\"" + num(ay) + "\" x2=\"" + num(ax) +
         "\" y2=\"" + num(y(a.actual.diversity + a.diversity_gain_abs)) + "\"/>\n";
    s += "<line class=\"gain-performance\" x1=\"" + num(ax) + "\" y1=\"" + num(ay) + "\" x2=\"" +
         num(x(a.actual.performance + a.performance_gain_abs)) + "\" y2=\"" + num(ay) + "\"/>\n";
    s += "</g>\n";
    s += "<circle cx=\"" + num(ax) + "\" cy=\"" + num(ay) + "\" r=\"5\" fill=\"#d62728\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace spf
