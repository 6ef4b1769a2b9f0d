#pragma once

// Planar polylines, symmetric two-junction networks and the geometric
// queries the flow and the diagnostics are built on.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netflow {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Raised when an operation is called outside its contract.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised for malformed geometry (NaN coordinates, repeated points, ...).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Point2
// ---------------------------------------------------------------------------

struct Point2 {
  double x1 = 0.0;
  double x2 = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend constexpr Point2 operator-(Point2 a) { return {-a.x1, -a.x2}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x1, s * a.x2}; }
  friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x1, s * a.x2}; }
  friend constexpr Point2 operator/(Point2 a, double s) { return {a.x1 / s, a.x2 / s}; }
  Point2& operator+=(Point2 b) { x1 += b.x1; x2 += b.x2; return *this; }
  Point2& operator-=(Point2 b) { x1 -= b.x1; x2 -= b.x2; return *this; }
  friend constexpr bool operator==(Point2, Point2) = default;

  bool finite() const { return std::isfinite(x1) && std::isfinite(x2); }
};

constexpr double dot(Point2 a, Point2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
constexpr double cross(Point2 a, Point2 b) { return a.x1 * b.x2 - a.x2 * b.x1; }
inline double norm(Point2 a) { return std::hypot(a.x1, a.x2); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 normalized(Point2 a) { return a / norm(a); }
/// Counter-clockwise quarter turn; maps a tangent to its positive normal.
constexpr Point2 rotate90(Point2 a) { return {-a.x2, a.x1}; }
/// Reflection across the diagonal x1 = x2.
constexpr Point2 swapped(Point2 a) { return {a.x2, a.x1}; }
inline double angle_of(Point2 a) { return std::atan2(a.x2, a.x1); }

/// Smallest absolute difference between two angles.
inline double angle_between(Point2 a, Point2 b) {
  return std::abs(std::atan2(cross(a, b), dot(a, b)));
}

// ---------------------------------------------------------------------------
// DiscreteCurve
// ---------------------------------------------------------------------------

/// Ordered point list. Construction rejects non-finite coordinates and
/// consecutive points closer than `min_segment`; simplicity is checked
/// separately by is_simple() because it needs a tolerance.
class DiscreteCurve {
 public:
  DiscreteCurve() = default;

  DiscreteCurve(std::vector<Point2> points, bool closed, double min_segment = 0.0)
      : points_(std::move(points)), closed_(closed) {
    if (points_.size() < 3) throw GeometryError("curve needs at least 3 points");
    for (const auto& p : points_) {
      if (!p.finite()) throw GeometryError("curve has a non-finite coordinate");
    }
    const std::size_t segs = segment_count();
    for (std::size_t i = 0; i < segs; ++i) {
      if (!(segment_length(i) > min_segment)) {
        throw GeometryError("degenerate segment " + std::to_string(i));
      }
    }
  }

  const std::vector<Point2>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool closed() const { return closed_; }
  const Point2& operator[](std::size_t i) const { return points_[i]; }
  const Point2& front() const { return points_.front(); }
  const Point2& back() const { return points_.back(); }

  std::size_t segment_count() const { return closed_ ? points_.size() : points_.size() - 1; }
  Point2 segment_start(std::size_t i) const { return points_[i]; }
  Point2 segment_end(std::size_t i) const { return points_[(i + 1) % points_.size()]; }
  double segment_length(std::size_t i) const { return distance(segment_start(i), segment_end(i)); }

  double length() const {
    double l = 0.0;
    for (std::size_t i = 0; i < segment_count(); ++i) l += segment_length(i);
    return l;
  }

  double min_segment_length() const {
    double h = segment_length(0);
    for (std::size_t i = 1; i < segment_count(); ++i) h = std::min(h, segment_length(i));
    return h;
  }

  double max_radius() const {
    double r = 0.0;
    for (const auto& p : points_) r = std::max(r, norm(p));
    return r;
  }

 private:
  std::vector<Point2> points_;
  bool closed_ = false;
};

struct PointFrame {
  Point2 tangent;
  Point2 normal;
  double curvature = 0.0;
};

namespace detail {

/// Second derivative of the chord-length quadratic through p0, p1, p2
/// (the arclength-weighted centered second difference at p1).
inline Point2 second_difference(Point2 p0, Point2 p1, Point2 p2) {
  const double hm = distance(p0, p1);
  const double hp = distance(p1, p2);
  return (2.0 / (hm + hp)) * ((p2 - p1) / hp - (p1 - p0) / hm);
}

/// Derivative at p1 of the chord-length quadratic through p0, p1, p2.
inline Point2 centered_derivative(Point2 p0, Point2 p1, Point2 p2) {
  const double hm = distance(p0, p1);
  const double hp = distance(p1, p2);
  return (hm / (hp * (hm + hp))) * (p2 - p1) + (hp / (hm * (hm + hp))) * (p1 - p0);
}

/// Derivative at p0 of the chord-length quadratic through p0, p1, p2.
inline Point2 one_sided_derivative(Point2 p0, Point2 p1, Point2 p2) {
  const double h1 = distance(p0, p1);
  const double h2 = distance(p1, p2);
  return (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) * p0 + ((h1 + h2) / (h1 * h2)) * p1 -
         (h1 / (h2 * (h1 + h2))) * p2;
}

}  // namespace detail

/// Per-point unit tangent, positive normal and signed curvature.
/// Interior points use centered arclength-weighted stencils; open-curve
/// endpoints use the one-sided quadratic through the first (last) three points.
inline std::vector<PointFrame> derived_quantities(const DiscreteCurve& curve) {
  const auto& p = curve.points();
  const std::size_t n = p.size();
  std::vector<PointFrame> out(n);
  auto fill = [&](std::size_t i, Point2 d1, Point2 d2) {
    const Point2 t = normalized(d1);
    const Point2 nu = rotate90(t);
    out[i] = {t, nu, dot(d2, nu)};
  };
  for (std::size_t i = 0; i < n; ++i) {
    const bool interior = curve.closed() || (i > 0 && i + 1 < n);
    if (interior) {
      const Point2 a = p[(i + n - 1) % n];
      const Point2 b = p[(i + 1) % n];
      fill(i, detail::centered_derivative(a, p[i], b), detail::second_difference(a, p[i], b));
    } else if (i == 0) {
      fill(i, detail::one_sided_derivative(p[0], p[1], p[2]),
           detail::second_difference(p[0], p[1], p[2]));
    } else {
      // walk the curve backwards and flip the tangent back
      const Point2 d = detail::one_sided_derivative(p[n - 1], p[n - 2], p[n - 3]);
      fill(i, -d, detail::second_difference(p[n - 3], p[n - 2], p[n - 1]));
    }
  }
  return out;
}

/// Approximates the total signed turning ∫κ ds by trapezoid-weighted
/// nodal curvatures.
inline double turning_integral(const DiscreteCurve& curve) {
  const auto frames = derived_quantities(curve);
  const std::size_t n = curve.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    if (curve.closed() || i > 0) w += 0.5 * distance(curve[(i + n - 1) % n], curve[i]);
    if (curve.closed() || i + 1 < n) w += 0.5 * distance(curve[i], curve[(i + 1) % n]);
    total += w * frames[i].curvature;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Segment queries
// ---------------------------------------------------------------------------

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double l2 = dot(ab, ab);
  double s = l2 > 0.0 ? dot(p - a, ab) / l2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return distance(p, a + s * ab);
}

inline double segment_segment_distance(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return 0.0;
  }
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

/// Sweep over segments sorted by their leftmost abscissa; non-adjacent
/// segments closer than `tol` make the curve non-simple.
inline bool is_simple(const DiscreteCurve& curve, double tol) {
  const std::size_t m = curve.segment_count();
  struct Box {
    double lo, hi;
    std::size_t idx;
  };
  std::vector<Box> boxes(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 a = curve.segment_start(i);
    const Point2 b = curve.segment_end(i);
    boxes[i] = {std::min(a.x1, b.x1) - tol, std::max(a.x1, b.x1) + tol, i};
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box& l, const Box& r) { return l.lo < r.lo; });
  auto adjacent = [&](std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    if (j == i + 1) return true;
    return curve.closed() && i == 0 && j == m - 1;
  };
  std::vector<Box> active;
  for (const auto& box : boxes) {
    std::erase_if(active, [&](const Box& a) { return a.hi < box.lo; });
    for (const auto& other : active) {
      if (adjacent(box.idx, other.idx)) continue;
      const double dist =
          segment_segment_distance(curve.segment_start(box.idx), curve.segment_end(box.idx),
                                   curve.segment_start(other.idx), curve.segment_end(other.idx));
      if (dist <= tol) return false;
    }
    active.push_back(box);
  }
  return true;
}

/// Symmetric Hausdorff distance between two sets of segments, probing
/// each segment at `samples_per_segment + 1` evenly spaced points.
inline double hausdorff_distance(std::span<const std::pair<Point2, Point2>> a,
                                 std::span<const std::pair<Point2, Point2>> b,
                                 int samples_per_segment = 4) {
  auto one_way = [samples_per_segment](std::span<const std::pair<Point2, Point2>> from,
                                       std::span<const std::pair<Point2, Point2>> to) {
    double worst = 0.0;
    for (const auto& [p, q] : from) {
      for (int k = 0; k <= samples_per_segment; ++k) {
        const Point2 x = p + (static_cast<double>(k) / samples_per_segment) * (q - p);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [c, d] : to) best = std::min(best, point_segment_distance(x, c, d));
        worst = std::max(worst, best);
      }
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

// ---------------------------------------------------------------------------
// Test lines and intersection counting
// ---------------------------------------------------------------------------

/// Static line through the origin at `angle` radians from the x1-axis.
/// The admissible range for the monotonicity argument is (π/6, π/3).
class TestLine {
 public:
  explicit TestLine(double angle) : angle_(angle) {
    if (!(angle > std::numbers::pi / 6.0 && angle < std::numbers::pi / 3.0)) {
      throw ContractError("test line angle must lie strictly inside (pi/6, pi/3)");
    }
  }

  double angle() const { return angle_; }
  double slope() const { return std::tan(angle_); }
  Point2 direction() const { return {std::cos(angle_), std::sin(angle_)}; }
  /// Positive on the side above the line.
  double signed_distance(Point2 p) const { return cross(direction(), p); }

 private:
  double angle_;
};

struct IntersectionCount {
  int count = 0;
  bool tangency = false;
};

/// Transversal crossings of the polyline with the line. Vertices within
/// `tol` of the line are treated as on-line (they set the tangency flag and
/// are skipped when looking for sign changes); two consecutive crossings
/// closer than `pair_tol` along the polyline also set the flag.
inline IntersectionCount count_line_intersections(std::span<const Point2> polyline,
                                                  const TestLine& line, double tol,
                                                  std::optional<double> pair_tol = std::nullopt) {
  const double pair = pair_tol.value_or(tol);
  IntersectionCount out;
  int last_sign = 0;
  double arclength = 0.0;
  double last_crossing = -std::numeric_limits<double>::infinity();
  double last_arclength = 0.0;
  double last_dist = 0.0;
  for (std::size_t i = 0; i < polyline.size(); ++i) {
    if (i > 0) arclength += distance(polyline[i - 1], polyline[i]);
    const double d = line.signed_distance(polyline[i]);
    if (std::abs(d) <= tol) {
      out.tangency = true;
      continue;
    }
    const int sign = d > 0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) {
      // crossing located by linear interpolation between the straddling vertices
      const double w = last_dist / (last_dist - d);
      const double where = last_arclength + w * (arclength - last_arclength);
      if (where - last_crossing < pair) out.tangency = true;
      last_crossing = where;
      ++out.count;
    }
    last_sign = sign;
    last_arclength = arclength;
    last_dist = d;
  }
  return out;
}

inline IntersectionCount count_line_intersections(const DiscreteCurve& curve, const TestLine& line,
                                                  std::optional<double> tol = std::nullopt,
                                                  std::optional<double> pair_tol = std::nullopt) {
  std::vector<Point2> pts = curve.points();
  if (curve.closed()) pts.push_back(pts.front());
  const double t = tol.value_or(1e-9 * 2.0 * curve.max_radius());
  return count_line_intersections(pts, line, t, pair_tol);
}

// ---------------------------------------------------------------------------
// Symmetric networks
// ---------------------------------------------------------------------------

enum class NetworkType { Tree, Lens, Theta, Eyeglasses };
enum class Axis { X1, X2 };

inline std::string_view to_string(NetworkType t) {
  switch (t) {
    case NetworkType::Tree: return "tree";
    case NetworkType::Lens: return "lens";
    case NetworkType::Theta: return "theta";
    case NetworkType::Eyeglasses: return "eyeglasses";
  }
  return "?";
}

inline std::string_view to_string(Axis a) { return a == Axis::X1 ? "x1" : "x2"; }

inline NetworkType parse_network_type(std::string_view s) {
  if (s == "tree") return NetworkType::Tree;
  if (s == "lens") return NetworkType::Lens;
  if (s == "theta") return NetworkType::Theta;
  if (s == "eyeglasses") return NetworkType::Eyeglasses;
  throw std::invalid_argument("unknown network type: " + std::string(s));
}

inline Axis parse_axis(std::string_view s) {
  if (s == "x1") return Axis::X1;
  if (s == "x2") return Axis::X2;
  throw std::invalid_argument("unknown axis: " + std::string(s));
}

constexpr Axis other(Axis a) { return a == Axis::X1 ? Axis::X2 : Axis::X1; }
constexpr Point2 unit(Axis a) { return a == Axis::X1 ? Point2{1.0, 0.0} : Point2{0.0, 1.0}; }
inline double along(Axis a, Point2 p) { return a == Axis::X1 ? p.x1 : p.x2; }
inline double off(Axis a, Point2 p) { return a == Axis::X1 ? p.x2 : p.x1; }

/// Unit tangent of the defining curve at the junction. For the junction
/// on the x1-axis this is (1/2, √3/2) (the lens arc leaves the junction
/// backwards, at (-1/2, √3/2)); the x2-axis versions are the diagonal
/// reflections.
inline Point2 junction_tangent(NetworkType type, Axis axis) {
  const double h = std::sqrt(3.0) / 2.0;
  const Point2 t = type == NetworkType::Lens ? Point2{-0.5, h} : Point2{0.5, h};
  return axis == Axis::X1 ? t : swapped(t);
}

/// Axis carrying the free outer endpoint (lens, theta, eyeglasses).
inline Axis endpoint_axis(NetworkType type, Axis junction_axis) {
  return type == NetworkType::Eyeglasses ? junction_axis : other(junction_axis);
}

/// Unit tangent of the defining curve at a free outer endpoint: it meets
/// its axis perpendicularly, heading back toward the other axis.
inline Point2 endpoint_tangent(NetworkType type, Axis junction_axis) {
  const Axis e = endpoint_axis(type, junction_axis);
  return e == Axis::X1 ? Point2{0.0, -1.0} : Point2{-1.0, 0.0};
}

inline bool has_regions(NetworkType t) { return t != NetworkType::Tree; }
inline bool has_bridge(NetworkType t) { return t != NetworkType::Lens; }

struct SymmetricNetwork {
  DiscreteCurve defining;
  NetworkType type = NetworkType::Tree;
  Axis junction_axis = Axis::X1;
  std::optional<Point2> anchor;

  Point2 junction() const { return defining.front(); }
  double junction_distance() const { return norm(junction()); }
};

struct ValidationTolerances {
  double position = 1e-9;
  double angle = 5e-2;
  double simplicity = 0.0;
};

/// Lists every violated network invariant; empty when valid.
inline std::vector<std::string> check_invariants(const SymmetricNetwork& net,
                                                 const ValidationTolerances& tol = {}) {
  std::vector<std::string> bad;
  const auto& c = net.defining;
  if (c.closed()) bad.emplace_back("defining curve must be open");
  if (std::abs(off(net.junction_axis, c.front())) > tol.position) {
    bad.emplace_back("junction is off the junction axis");
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].x1 < -tol.position || c[i].x2 < -tol.position) {
      bad.emplace_back("point " + std::to_string(i) + " leaves the first quadrant");
      break;
    }
  }
  const auto frames = derived_quantities(c);
  if (angle_between(frames.front().tangent, junction_tangent(net.type, net.junction_axis)) >
      tol.angle) {
    bad.emplace_back("junction tangent violates the 2pi/3 condition");
  }
  if (net.type == NetworkType::Tree) {
    if (!net.anchor) {
      bad.emplace_back("tree needs an anchor");
    } else if (distance(c.back(), *net.anchor) > tol.position) {
      bad.emplace_back("tree endpoint differs from the anchor");
    }
  } else {
    if (net.anchor) bad.emplace_back("only trees carry an anchor");
    const Axis e = endpoint_axis(net.type, net.junction_axis);
    if (std::abs(off(e, c.back())) > tol.position) bad.emplace_back("free endpoint is off its axis");
    if (angle_between(frames.back().tangent, endpoint_tangent(net.type, net.junction_axis)) >
        tol.angle) {
      bad.emplace_back("free endpoint is not perpendicular to its axis");
    }
  }
  if (tol.simplicity > 0.0 && !is_simple(c, tol.simplicity)) {
    bad.emplace_back("defining curve self-intersects");
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Reconstruction of the full network
// ---------------------------------------------------------------------------

struct Segment {
  Point2 a;
  Point2 b;
  double length() const { return distance(a, b); }
};

struct FullNetwork {
  /// Defining curve, then its reflections across the x1-axis, the x2-axis
  /// and both axes.
  std::vector<DiscreteCurve> arcs;
  /// Straight edge joining the two junctions through the origin.
  std::optional<Segment> bridge;
  bool bridge_degenerate = false;

  std::vector<std::pair<Point2, Point2>> segments() const {
    std::vector<std::pair<Point2, Point2>> out;
    for (const auto& arc : arcs) {
      for (std::size_t i = 0; i < arc.segment_count(); ++i) {
        out.emplace_back(arc.segment_start(i), arc.segment_end(i));
      }
    }
    if (bridge) out.emplace_back(bridge->a, bridge->b);
    return out;
  }
};

inline DiscreteCurve reflect(const DiscreteCurve& c, bool flip_x1, bool flip_x2) {
  std::vector<Point2> pts;
  pts.reserve(c.size());
  for (const auto& p : c.points()) {
    pts.push_back({flip_x1 ? -p.x1 : p.x1, flip_x2 ? -p.x2 : p.x2});
  }
  return DiscreteCurve(std::move(pts), c.closed());
}

inline FullNetwork reconstruct_full(const SymmetricNetwork& net) {
  FullNetwork out;
  out.arcs.push_back(net.defining);
  out.arcs.push_back(reflect(net.defining, false, true));
  out.arcs.push_back(reflect(net.defining, true, false));
  out.arcs.push_back(reflect(net.defining, true, true));
  if (has_bridge(net.type)) {
    const Point2 j = net.junction();
    out.bridge = Segment{-j, j};
    out.bridge_degenerate = norm(j) == 0.0;
  }
  return out;
}

/// Diameter of the reconstructed network. The network is invariant under
/// the point reflection through the origin, so this is twice the largest
/// distance from the origin.
inline double network_diameter(const SymmetricNetwork& net) {
  return 2.0 * net.defining.max_radius();
}

/// Signed shoelace area of the polygon origin -> curve points.
inline double sector_area(const DiscreteCurve& c) {
  double a = 0.0;
  const auto& p = c.points();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) a += cross(p[i], p[i + 1]);
  return 0.5 * a;
}

/// Area of each bounded region: one for the lens, two congruent regions
/// for theta and eyeglasses.
inline std::vector<double> enclosed_area(const SymmetricNetwork& net) {
  if (!has_regions(net.type)) throw ContractError("a tree encloses no regions");
  // Both endpoints of the defining curve sit on coordinate axes, so the
  // closing chords through the origin add no area.
  const double quarter = std::abs(sector_area(net.defining));
  switch (net.type) {
    case NetworkType::Lens: return {4.0 * quarter};
    case NetworkType::Theta:
    case NetworkType::Eyeglasses: return {2.0 * quarter, 2.0 * quarter};
    case NetworkType::Tree: break;
  }
  return {};
}

/// Number of triple-junction corners on the boundary of each region.
inline int region_corner_count(NetworkType t) {
  switch (t) {
    case NetworkType::Lens:
    case NetworkType::Theta: return 2;
    case NetworkType::Eyeglasses: return 1;
    case NetworkType::Tree: break;
  }
  throw ContractError("a tree encloses no regions");
}

/// Rate at which each region loses area: the boundary turns by
/// 2π minus π/3 per 2π/3 corner.
inline double gauss_bonnet_rate(NetworkType t) {
  return 2.0 * std::numbers::pi - region_corner_count(t) * std::numbers::pi / 3.0;
}

}  // namespace netflow
