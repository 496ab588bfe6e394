#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "uavjam/errors.hpp"
#include "uavjam/io.hpp"
#include "uavjam/scenario.hpp"

namespace uavjam {

// Rendered figure plus the numbers it shows, one CSV row per plotted point.
struct Figure {
  std::string svg;
  std::string data_csv;
};

namespace detail {

struct Frame {
  double x0, x1, y0, y1;  // data window
  double w = 800.0, h = 560.0, pad = 60.0;

  double px(double x) const { return pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad); }
  double py(double y) const { return h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad); }
};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string svg_open(const Frame& f) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(f.w) + "\" height=\"" + num(f.h) +
         "\" viewBox=\"0 0 " + num(f.w) + " " + num(f.h) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "<line x1=\"" + num(f.pad) + "\" y1=\"" + num(f.h - f.pad) + "\" x2=\"" + num(f.w - f.pad) + "\" y2=\"" +
       num(f.h - f.pad) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(f.pad) + "\" y1=\"" + num(f.pad) + "\" x2=\"" + num(f.pad) + "\" y2=\"" + num(f.h - f.pad) +
       "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = f.x0 + (f.x1 - f.x0) * t / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * t / 4.0;
    s += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(f.h - f.pad + 18) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
    s += "<text x=\"" + num(f.pad - 6) + "\" y=\"" + num(f.py(yv) + 4) + "\" font-size=\"11\" text-anchor=\"end\">" +
         num(yv) + "</text>\n";
  }
  s += "<text x=\"" + num(f.w / 2) + "\" y=\"" + num(f.h - 12) + "\" font-size=\"13\" text-anchor=\"middle\">" + xlabel +
       "</text>\n";
  s += "<text x=\"16\" y=\"" + num(f.h / 2) + "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num(f.h / 2) + ")\">" + ylabel + "</text>\n";
  return s;
}

inline void pad_range(double& lo, double& hi, double frac) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double m = (hi - lo) * frac;
  lo -= m;
  hi += m;
}

}  // namespace detail

// Deployment scatter: UAV markers, heading arrows and main-lobe wedges of
// half-angle theta. Targets, control center and the x_max boundary are drawn
// when a scenario is supplied.
inline Figure plot_deployment(const CsvTable& t, const std::optional<Scenario>& s) {
  const std::size_t cx = t.column("x");
  const std::size_t cy = t.column("y");
  const std::size_t cpsi = t.column("psi_rad");
  const std::size_t cid = t.column("uav_id");
  if (t.rows.empty()) throw ParseError("deployment table has no rows", 2, "");
  const double theta = s ? s->half_beamwidth() : deg_to_rad(defaults::kHalfBeamwidthDeg);

  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    xs.push_back(t.number(r, cx));
    ys.push_back(t.number(r, cy));
  }
  if (s) {
    for (int k = 0; k < s->num_targets(); ++k) {
      xs.push_back(s->target(k).x());
      ys.push_back(s->target(k).y());
    }
    xs.push_back(s->control_center().x());
    ys.push_back(s->control_center().y());
  }
  detail::Frame f;
  f.x0 = *std::min_element(xs.begin(), xs.end());
  f.x1 = *std::max_element(xs.begin(), xs.end());
  f.y0 = *std::min_element(ys.begin(), ys.end());
  f.y1 = *std::max_element(ys.begin(), ys.end());
  detail::pad_range(f.x0, f.x1, 0.15);
  detail::pad_range(f.y0, f.y1, 0.15);
  // Equal scale on both axes so wedge angles are true.
  const double sx = (f.x1 - f.x0) / (f.w - 2 * f.pad);
  const double sy = (f.y1 - f.y0) / (f.h - 2 * f.pad);
  if (sx > sy) {
    const double c = 0.5 * (f.y0 + f.y1);
    const double half = 0.5 * sx * (f.h - 2 * f.pad);
    f.y0 = c - half;
    f.y1 = c + half;
  } else {
    const double c = 0.5 * (f.x0 + f.x1);
    const double half = 0.5 * sy * (f.w - 2 * f.pad);
    f.x0 = c - half;
    f.x1 = c + half;
  }
  const double reach = 0.25 * (f.x1 - f.x0);

  Figure fig;
  fig.data_csv = "series,id,x,y,psi_rad\n";
  std::string& o = fig.svg;
  o = detail::svg_open(f);
  o += detail::axes(f, "x (m)", "y (m)");
  if (s) {
    const double xb = s->deploy_x_max();
    if (xb > f.x0 && xb < f.x1) {
      o += "<line class=\"boundary\" x1=\"" + detail::num(f.px(xb)) + "\" y1=\"" + detail::num(f.pad) + "\" x2=\"" +
           detail::num(f.px(xb)) + "\" y2=\"" + detail::num(f.h - f.pad) +
           "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n";
    }
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double x = t.number(r, cx);
    const double y = t.number(r, cy);
    const double psi = t.number(r, cpsi);
    auto tip = [&](double a, double len) {
      return detail::num(f.px(x + len * std::cos(a))) + " " + detail::num(f.py(y + len * std::sin(a)));
    };
    const double rpx = reach / (f.x1 - f.x0) * (f.w - 2 * f.pad);
    o += "<path class=\"lobe\" d=\"M " + detail::num(f.px(x)) + " " + detail::num(f.py(y)) + " L " +
         tip(psi - theta, reach) + " A " + detail::num(rpx) + " " + detail::num(rpx) + " 0 0 0 " +
         tip(psi + theta, reach) + " Z\" fill=\"orange\" fill-opacity=\"0.25\" stroke=\"orange\"/>\n";
    o += "<line class=\"heading\" x1=\"" + detail::num(f.px(x)) + "\" y1=\"" + detail::num(f.py(y)) + "\" x2=\"" +
         detail::num(f.px(x + 0.5 * reach * std::cos(psi))) + "\" y2=\"" +
         detail::num(f.py(y + 0.5 * reach * std::sin(psi))) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    o += "<circle class=\"uav\" cx=\"" + detail::num(f.px(x)) + "\" cy=\"" + detail::num(f.py(y)) +
         "\" r=\"5\" fill=\"steelblue\"/>\n";
    fig.data_csv += "uav," + t.rows[r][cid] + "," + fmt_double(x) + "," + fmt_double(y) + "," + fmt_double(psi) + "\n";
  }
  if (s) {
    for (int k = 0; k < s->num_targets(); ++k) {
      const Vec3 p = s->target(k);
      o += "<rect class=\"target\" x=\"" + detail::num(f.px(p.x()) - 5) + "\" y=\"" + detail::num(f.py(p.y()) - 5) +
           "\" width=\"10\" height=\"10\" fill=\"crimson\"/>\n";
      fig.data_csv += "target," + std::to_string(k) + "," + fmt_double(p.x()) + "," + fmt_double(p.y()) + ",\n";
    }
    const Vec3 c = s->control_center();
    o += "<polygon class=\"center\" points=\"" + detail::num(f.px(c.x())) + "," + detail::num(f.py(c.y()) - 7) + " " +
         detail::num(f.px(c.x()) - 6) + "," + detail::num(f.py(c.y()) + 5) + " " + detail::num(f.px(c.x()) + 6) + "," +
         detail::num(f.py(c.y()) + 5) + "\" fill=\"darkgreen\"/>\n";
    fig.data_csv += "center,0," + fmt_double(c.x()) + "," + fmt_double(c.y()) + ",\n";
  }
  o += "</svg>\n";
  return fig;
}

// Mean average SINR versus M, one curve per scheme, from an aggregate table.
inline Figure plot_curves(const CsvTable& t) {
  const std::size_t cs = t.column("scheme");
  const std::size_t cm = t.column("M");
  const std::size_t cv = t.column("mean_avg_sinr_db");
  if (t.rows.empty()) throw ParseError("aggregate table has no rows", 2, "");

  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& name = t.rows[r][cs];
    const double v = t.number(r, cv);
    if (!std::isfinite(v)) continue;
    if (!series.count(name)) order.push_back(name);
    series[name].emplace_back(t.number(r, cm), v);
  }
  if (series.empty()) throw ParseError("aggregate table has no finite values", 2, "mean_avg_sinr_db");

  detail::Frame f;
  f.x0 = f.y0 = std::numeric_limits<double>::infinity();
  f.x1 = f.y1 = -std::numeric_limits<double>::infinity();
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (auto [m, v] : pts) {
      f.x0 = std::min(f.x0, m);
      f.x1 = std::max(f.x1, m);
      f.y0 = std::min(f.y0, v);
      f.y1 = std::max(f.y1, v);
    }
  }
  detail::pad_range(f.x0, f.x1, 0.05);
  detail::pad_range(f.y0, f.y1, 0.1);

  static const char* kColors[] = {"crimson", "steelblue", "darkgreen", "darkorange", "purple", "black"};
  Figure fig;
  fig.data_csv = "scheme,M,mean_avg_sinr_db\n";
  std::string& o = fig.svg;
  o = detail::svg_open(f);
  o += detail::axes(f, "number of UAVs M", "mean average SINR (dB)");
  for (std::size_t c = 0; c < order.size(); ++c) {
    const auto& pts = series[order[c]];
    const char* color = kColors[c % std::size(kColors)];
    std::string poly;
    for (auto [m, v] : pts) {
      poly += detail::num(f.px(m)) + "," + detail::num(f.py(v)) + " ";
      fig.data_csv += order[c] + "," + fmt_double(m) + "," + fmt_double(v) + "\n";
    }
    o += "<polyline class=\"curve\" points=\"" + poly + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    for (auto [m, v] : pts) {
      o += "<circle cx=\"" + detail::num(f.px(m)) + "\" cy=\"" + detail::num(f.py(v)) + "\" r=\"3\" fill=\"" + color +
           "\"/>\n";
    }
    const double ly = f.pad + 10 + 18.0 * static_cast<double>(c);
    o += "<g class=\"legend-entry\"><line x1=\"" + detail::num(f.w - f.pad - 150) + "\" y1=\"" + detail::num(ly) +
         "\" x2=\"" + detail::num(f.w - f.pad - 125) + "\" y2=\"" + detail::num(ly) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/><text x=\"" + detail::num(f.w - f.pad - 118) + "\" y=\"" + detail::num(ly + 4) +
         "\" font-size=\"12\">" + order[c] + "</text></g>\n";
  }
  o += "</svg>\n";
  return fig;
}

}  // namespace uavjam
