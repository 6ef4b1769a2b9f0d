#pragma once

// Plain-text records for curves and symmetric networks.
//
// Curve:    a header line `open` or `closed`, then one `x1 x2` pair per line.
// Network:  `type <name>`, `junction_axis <x1|x2>`, `anchor <x1 x2|none>`,
//           `defining`, followed by the curve record.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "netflow/geometry.hpp"

namespace netflow {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_real(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void write_curve(std::ostream& os, const DiscreteCurve& c) {
  os << (c.closed() ? "closed" : "open") << '\n';
  for (const auto& p : c.points()) os << format_real(p.x1) << ' ' << format_real(p.x2) << '\n';
}

namespace detail {

inline bool next_content_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) return true;
  }
  return false;
}

inline Point2 parse_point(const std::string& text) {
  std::istringstream ss(text);
  Point2 p;
  std::string extra;
  if (!(ss >> p.x1 >> p.x2) || (ss >> extra)) throw FormatError("malformed point: '" + text + "'");
  return p;
}

}  // namespace detail

/// Reads a curve record; stops at end of input.
inline DiscreteCurve read_curve(std::istream& is) {
  std::string line;
  if (!detail::next_content_line(is, line)) throw FormatError("empty curve record");
  bool closed = false;
  if (line == "closed") {
    closed = true;
  } else if (line != "open") {
    throw FormatError("curve header must be 'open' or 'closed'");
  }
  std::vector<Point2> pts;
  while (detail::next_content_line(is, line)) pts.push_back(detail::parse_point(line));
  try {
    return DiscreteCurve(std::move(pts), closed);
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid curve: ") + e.what());
  }
}

inline void write_network(std::ostream& os, const SymmetricNetwork& net) {
  os << "type " << to_string(net.type) << '\n';
  os << "junction_axis " << to_string(net.junction_axis) << '\n';
  if (net.anchor) {
    os << "anchor " << format_real(net.anchor->x1) << ' ' << format_real(net.anchor->x2) << '\n';
  } else {
    os << "anchor none\n";
  }
  os << "defining\n";
  write_curve(os, net.defining);
}

inline SymmetricNetwork read_network(std::istream& is) {
  auto field = [&](const std::string& key) {
    std::string line;
    if (!detail::next_content_line(is, line)) throw FormatError("missing field '" + key + "'");
    if (line.rfind(key, 0) != 0) throw FormatError("expected field '" + key + "', got '" + line + "'");
    const auto pos = line.find_first_not_of(' ', key.size());
    return pos == std::string::npos ? std::string() : line.substr(pos);
  };
  try {
    const NetworkType type = parse_network_type(field("type"));
    const Axis axis = parse_axis(field("junction_axis"));
    const std::string anchor_text = field("anchor");
    std::optional<Point2> anchor;
    if (anchor_text != "none") anchor = detail::parse_point(anchor_text);
    field("defining");
    return SymmetricNetwork{read_curve(is), type, axis, anchor};
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid network record: ") + e.what());
  }
}

inline void save_network(const std::string& path, const SymmetricNetwork& net) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_network(os, net);
}

inline SymmetricNetwork load_network(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_network(is);
}

}  // namespace netflow
