#pragma once

// Standalone SVG drawing of a reconstructed network with the coordinate
// axes and test lines overlaid.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "netflow/geometry.hpp"

namespace netflow {

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string format_t(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Writes the full network at time t. `extent` is the half-width of the
/// square drawing region in network units.
inline void write_svg(std::ostream& os, const SymmetricNetwork& net, double t,
                      std::span<const double> line_angles, double extent) {
  constexpr double size = 600.0;
  const double scale = size / (2.0 * extent);
  auto px = [&](Point2 p) {
    return detail::svg_num((p.x1 + extent) * scale) + "," + detail::svg_num((extent - p.x2) * scale);
  };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n";
  os << "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  os << "<g stroke=\"#bbbbbb\" stroke-width=\"1\">\n";
  os << "<line x1=\"0\" y1=\"300.000\" x2=\"600\" y2=\"300.000\"/>\n";
  os << "<line x1=\"300.000\" y1=\"0\" x2=\"300.000\" y2=\"600\"/>\n";
  os << "</g>\n";
  os << "<g stroke=\"#d06030\" stroke-width=\"1\" stroke-dasharray=\"6,4\">\n";
  for (double a : line_angles) {
    const Point2 d{std::cos(a), std::sin(a)};
    const double r = 2.0 * extent;
    os << "<polyline fill=\"none\" points=\"" << px(-r * d) << ' ' << px(r * d) << "\"/>\n";
  }
  os << "</g>\n";
  const FullNetwork full = reconstruct_full(net);
  os << "<g stroke=\"#1f3f8f\" stroke-width=\"2\" fill=\"none\">\n";
  for (const auto& arc : full.arcs) {
    os << "<polyline points=\"";
    for (std::size_t i = 0; i < arc.size(); ++i) os << (i ? " " : "") << px(arc[i]);
    os << "\"/>\n";
  }
  if (full.bridge && !full.bridge_degenerate) {
    os << "<polyline points=\"" << px(full.bridge->a) << ' ' << px(full.bridge->b) << "\"/>\n";
  }
  os << "</g>\n";
  os << "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">" << to_string(net.type)
     << "  t=" << detail::format_t(t) << "</text>\n";
  os << "</svg>\n";
}

}  // namespace netflow
