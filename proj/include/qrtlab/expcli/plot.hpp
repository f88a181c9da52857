// Copyright 2026 The qrtlab Authors.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qrtlab/expcli/artifacts.hpp"
#include "qrtlab/expcli/config.hpp"

namespace qrtlab::expcli {

namespace detail {

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double map(double v, double px0, double px1) const {
    const double a = log ? std::log10(lo) : lo, b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    return px0 + (x - a) / (b - a) * (px1 - px0);
  }
};

inline std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) t.push_back(std::abs(v) < 1e-14 * step ? 0.0 : v);
  return t;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

}  // namespace detail

inline std::string render_svg(const CsvData& csv, const PlotSpec& spec) {
  if (spec.y.empty()) throw SchemaError("plot.y: at least one column required");
  const auto x = csv.numeric(spec.x);
  std::vector<std::vector<double>> ys;
  for (const auto& c : spec.y) ys.push_back(csv.numeric(c));
  std::vector<double> err;
  if (!spec.err.empty()) err = csv.numeric(spec.err);

  auto transform = [&](double v) {
    if (spec.one_minus_over) return std::abs(1.0 - v / *spec.one_minus_over);
    return v;
  };
  auto terr = [&](double e) { return spec.one_minus_over ? e / std::abs(*spec.one_minus_over) : e; };

  detail::Axis ax, ay;
  ay.log = spec.log_y;
  ax.lo = std::numeric_limits<double>::infinity();
  ax.hi = -ax.lo;
  ay.lo = ax.lo;
  ay.hi = ax.hi;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) continue;
    ax.lo = std::min(ax.lo, x[i]);
    ax.hi = std::max(ax.hi, x[i]);
    for (std::size_t s = 0; s < ys.size(); ++s) {
      const double v = transform(ys[s][i]);
      if (!std::isfinite(v) || (ay.log && v <= 0.0)) continue;
      const double e = (s == 0 && !err.empty() && std::isfinite(err[i])) ? terr(err[i]) : 0.0;
      ay.lo = std::min(ay.lo, ay.log ? v : v - e);
      ay.hi = std::max(ay.hi, v + e);
    }
  }
  if (!std::isfinite(ax.lo) || !std::isfinite(ay.lo)) throw SchemaError("plot: no finite points to draw");
  if (ax.hi == ax.lo) ax.hi = ax.lo + 1.0;
  if (ay.log) {
    ay.lo = std::pow(10.0, std::floor(std::log10(ay.lo)));
    ay.hi = std::pow(10.0, std::ceil(std::log10(ay.hi)));
    if (ay.hi <= ay.lo) ay.hi = ay.lo * 10.0;
  } else {
    if (ay.hi == ay.lo) ay.hi = ay.lo + 1.0;
    const double pad = 0.05 * (ay.hi - ay.lo);
    ay.lo -= pad;
    ay.hi += pad;
  }

  const double w = 640, h = 420, l = 70, r = 20, t = 40, b = 50;
  const double x0 = l, x1 = w - r, y0 = h - b, y1 = t;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\" stroke=\"black\"/>\n";
  for (double v : detail::linear_ticks(ax.lo, ax.hi)) {
    const double px = ax.map(v, x0, x1);
    os << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 5 << "\" stroke=\"black\"/>"
       << "<text x=\"" << px << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">" << detail::fmt(v) << "</text>\n";
  }
  std::vector<double> yt;
  if (ay.log) {
    for (double v = ay.lo; v <= ay.hi * 1.0001; v *= 10.0) yt.push_back(v);
  } else {
    yt = detail::linear_ticks(ay.lo, ay.hi);
  }
  for (double v : yt) {
    const double py = ay.map(v, y0, y1);
    os << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py << "\" stroke=\"black\"/>"
       << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << detail::fmt(v) << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">" << spec.x << "</text>\n";
  if (!spec.title.empty())
    os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << spec.title << "</text>\n";

  for (std::size_t s = 0; s < ys.size(); ++s) {
    const char* col = colors[s % 5];
    std::ostringstream pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = transform(ys[s][i]);
      if (!std::isfinite(x[i]) || !std::isfinite(v) || (ay.log && v <= 0.0)) continue;
      const double px = ax.map(x[i], x0, x1), py = ay.map(v, y0, y1);
      pts << px << "," << py << " ";
      os << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"2.5\" fill=\"" << col << "\"/>\n";
      if (s == 0 && !err.empty() && std::isfinite(err[i]) && err[i] > 0.0) {
        const double e = terr(err[i]);
        const double lo = ay.log ? std::max(v - e, ay.lo) : v - e;
        os << "<line x1=\"" << px << "\" y1=\"" << ay.map(lo, y0, y1) << "\" x2=\"" << px << "\" y2=\""
           << ay.map(v + e, y0, y1) << "\" stroke=\"" << col << "\"/>\n";
      }
    }
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"" << pts.str() << "\"/>\n";
    os << "<text x=\"" << x1 - 150 << "\" y=\"" << y1 + 15 + 16 * s << "\" fill=\"" << col << "\">"
       << (spec.one_minus_over ? "|1 - " + spec.y[s] + "/ref|" : spec.y[s]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void plot(const std::filesystem::path& csv_path, const PlotSpec& spec, const std::filesystem::path& out_svg) {
  const CsvData csv = read_csv(csv_path);
  const std::string svg = render_svg(csv, spec);
  std::ofstream out(out_svg);
  if (!out) throw Error("cannot write '" + out_svg.string() + "'");
  out << svg;
}

}  // namespace qrtlab::expcli
