#pragma once

// Singular events of the extended flow: the event log, the restart past a
// junction collision, the post-restart scaling fit and the long-time
// classification of trees.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "netflow/expander.hpp"
#include "netflow/flow.hpp"
#include "netflow/geometry.hpp"
#include "netflow/resample.hpp"

namespace netflow {

// ---------------------------------------------------------------------------
// EventLog
// ---------------------------------------------------------------------------

inline bool is_terminal(EventKind k) { return k != EventKind::Type0; }

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::Type0;
  NetworkType before = NetworkType::Tree;
  std::optional<NetworkType> after;
};

class EventLog {
 public:
  const std::vector<Event>& events() const { return events_; }
  std::optional<double> terminal_time() const { return terminal_; }
  bool finished() const { return terminal_.has_value(); }

  void append(const Event& e) {
    if (finished()) throw ContractError("event log already holds a terminal event");
    if (!events_.empty() && !(e.t > events_.back().t)) {
      throw ContractError("event times must increase strictly");
    }
    if (e.kind == EventKind::Type0 && !e.after) {
      throw ContractError("a type-0 event needs the post-restart network type");
    }
    events_.push_back(e);
    if (is_terminal(e.kind)) terminal_ = e.t;
  }

  std::size_t type0_count() const {
    return static_cast<std::size_t>(std::count_if(
        events_.begin(), events_.end(), [](const Event& e) { return e.kind == EventKind::Type0; }));
  }

  std::vector<double> type0_times() const {
    std::vector<double> out;
    for (const auto& e : events_) {
      if (e.kind == EventKind::Type0) out.push_back(e.t);
    }
    return out;
  }

 private:
  std::vector<Event> events_;
  std::optional<double> terminal_;
};

// ---------------------------------------------------------------------------
// Standard transition
// ---------------------------------------------------------------------------

/// Network type after the junctions swap axes.
inline NetworkType transition_type(NetworkType t) {
  switch (t) {
    case NetworkType::Tree: return NetworkType::Tree;
    case NetworkType::Theta: return NetworkType::Eyeglasses;
    case NetworkType::Eyeglasses: return NetworkType::Theta;
    case NetworkType::Lens: break;
  }
  throw ContractError("a lens has no standard transition");
}

/// Time the unit expander needs to grow its junction distance to delta0.
inline double expander_age(double delta0) {
  const double b = expander().junction_height;
  return (delta0 / b) * (delta0 / b);
}

namespace detail {

/// Polar angle of a radially monotone polyline at radius r (linear in r
/// between vertices, clamped at the ends).
inline double polar_angle_at(std::span<const Point2> pts, double r) {
  if (r <= norm(pts.front())) return angle_of(pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double r1 = norm(pts[i]);
    if (r1 >= r) {
      const double r0 = norm(pts[i - 1]);
      const double w = (r - r0) / (r1 - r0);
      return (1.0 - w) * angle_of(pts[i - 1]) + w * angle_of(pts[i]);
    }
  }
  return angle_of(pts.back());
}

/// Replaces the part of `pts` (old junction on the x1-axis, near the
/// origin) inside radius 2*R by the expander arc with junction height
/// delta0 on the x2-axis, blending polar angles over [R, 2R].
inline std::vector<Point2> splice_expander(const std::vector<Point2>& pts, double delta0) {
  const auto& ex = expander();
  const double lambda = delta0 / ex.junction_height;
  // the unit arc agrees with its asymptote to ~1e-5 rad at radius 6
  const double inner = 6.0 * lambda;
  const double outer = 2.0 * inner;

  std::size_t k0 = 0;
  while (k0 < pts.size() && norm(pts[k0]) <= outer) ++k0;
  if (k0 + 2 >= pts.size()) throw ContractError("restart scale too large for the network");
  for (std::size_t i = 1; i <= k0; ++i) {
    if (!(norm(pts[i]) > norm(pts[i - 1]))) {
      throw ContractError("curve is not radially monotone near the collision");
    }
  }
  const std::span<const Point2> old_inner(pts.data(), k0 + 1);

  std::vector<Point2> scaled_arc;
  scaled_arc.reserve(ex.arc.size());
  for (const auto& p : ex.arc) scaled_arc.push_back(lambda * p);

  std::vector<Point2> out;
  for (const auto& p : scaled_arc) {
    if (norm(p) >= inner) break;
    out.push_back(p);
  }
  const double spacing = lambda * ex.ds;
  const int blend = std::max(8, static_cast<int>(std::ceil((outer - inner) / spacing)));
  for (int j = 0; j < blend; ++j) {
    const double r = inner + (outer - inner) * j / blend;
    const double s = static_cast<double>(j) / blend;
    const double w = s * s * (3.0 - 2.0 * s);
    const double phi = (1.0 - w) * polar_angle_at(scaled_arc, r) + w * polar_angle_at(old_inner, r);
    out.push_back({r * std::cos(phi), r * std::sin(phi)});
  }
  out.insert(out.end(), pts.begin() + static_cast<std::ptrdiff_t>(k0), pts.end());
  return out;
}

}  // namespace detail

/// Restarts the flow past a junction collision. The junctions reappear on
/// the other axis at distance delta0, joined to the old curve through the
/// self-similar expander; the clock is moved to the extrapolated collision
/// time plus the expander's age at that size.
inline SymmetricState standard_transition(const SymmetricState& state, const SolverConfig& cfg) {
  const auto& net = state.net;
  if (net.type == NetworkType::Lens) throw ContractError("a lens has no standard transition");
  if (!(net.junction_distance() < cfg.junction_tol)) {
    throw ContractError("standard_transition needs collided junctions");
  }
  if (max_abs(nodal_curvature(net)) >= cfg.kappa_blowup) {
    throw ContractError("standard_transition needs bounded curvature");
  }
  const bool flip = net.junction_axis == Axis::X2;
  std::vector<Point2> pts = net.defining.points();
  if (flip) {
    for (auto& p : pts) p = swapped(p);
  }
  std::vector<Point2> spliced = detail::splice_expander(pts, cfg.delta0());
  if (flip) {
    for (auto& p : spliced) p = swapped(p);
  }
  // snap the axis-bound coordinates
  const Axis new_axis = other(net.junction_axis);
  const NetworkType new_type = transition_type(net.type);
  (new_axis == Axis::X1 ? spliced.front().x2 : spliced.front().x1) = 0.0;

  SymmetricNetwork next{DiscreteCurve(spliced, false), new_type, new_axis, net.anchor};
  next.defining = respace(next, cfg, net.defining.size());
  const double t_singular = estimate_singular_time(state);
  return {std::move(next), t_singular + expander_age(cfg.delta0()), state.steps};
}

// ---------------------------------------------------------------------------
// Expander scaling fit
// ---------------------------------------------------------------------------

struct ExpanderFit {
  double c = 0.0;
  double exponent = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  double residual = 0.0;

  bool passes() const { return c > 0.0 && exponent >= 0.4 && exponent <= 0.6; }
};

struct DistanceSample {
  double t;
  double d;
};

/// Least-squares fit of log d against log(t - t_k).
inline ExpanderFit fit_expander_bound(std::span<const DistanceSample> series, double t_k) {
  if (series.size() < 20) throw ContractError("expander fit needs at least 20 samples");
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series[i].t > t_k) || !(series[i].d > 0.0)) {
      throw ContractError("expander fit needs positive distances after t_k");
    }
    if (i > 0 && (!(series[i].t > series[i - 1].t) || series[i].d < series[i - 1].d)) {
      throw ContractError("expander fit needs a nondecreasing series");
    }
  }
  const double n = static_cast<double>(series.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& s : series) {
    const double x = std::log(s.t - t_k);
    const double y = std::log(s.d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (const auto& s : series) {
    const double e = std::log(s.d) - (intercept + slope * std::log(s.t - t_k));
    ss += e * e;
  }
  return {std::exp(intercept), slope, series.front().t, series.back().t, std::sqrt(ss / n)};
}

// ---------------------------------------------------------------------------
// Long-time limits of trees
// ---------------------------------------------------------------------------

enum class LimitClass { SteinerTree, StandardCross, Undecided };

inline std::string_view to_string(LimitClass c) {
  switch (c) {
    case LimitClass::SteinerTree: return "steiner_tree";
    case LimitClass::StandardCross: return "standard_cross";
    case LimitClass::Undecided: return "undecided";
  }
  return "?";
}

struct LimitTolerances {
  /// Max |κ| below which the curve counts as straight.
  double rest_curvature = 1e-3;
  double junction_angle = 1e-3;
};

/// Junction of the Steiner tree spanned by the four reflected anchors, if
/// the symmetric tree with 2π/3 junctions exists (it sits on the x1-axis
/// when the anchor is below the 60° ray, on the x2-axis when above).
inline std::optional<Point2> steiner_junction(Point2 anchor) {
  const double r3 = std::sqrt(3.0);
  const double a = anchor.x1 - anchor.x2 / r3;
  if (a > 0.0) return Point2{a, 0.0};
  const double b = anchor.x2 - anchor.x1 / r3;
  if (b > 0.0) return Point2{0.0, b};
  return std::nullopt;
}

inline LimitClass classify_limit(const SymmetricState& state, const SolverConfig& cfg,
                                 const LimitTolerances& tol = {}) {
  const auto& net = state.net;
  if (net.type != NetworkType::Tree) throw ContractError("only trees have long-time limits");
  const auto& c = net.defining;
  const double kmax = max_abs(nodal_curvature(net));
  const bool straight = kmax < tol.rest_curvature;
  // with a straight edge the junction angle is the chord direction
  const Point2 chord = normalized(c.back() - c.front());
  const double angle_error = angle_between(chord, junction_tangent(net.type, net.junction_axis));
  const double dist = net.junction_distance();
  if (dist < cfg.junction_tol && straight) {
    const double to_ray = std::abs(angle_of(chord) - angle_of(junction_tangent(net.type, Axis::X1)));
    const double to_ray2 = std::abs(angle_of(chord) - angle_of(junction_tangent(net.type, Axis::X2)));
    if (std::min(to_ray, to_ray2) < std::numbers::pi / 6.0) return LimitClass::StandardCross;
  }
  if (dist > cfg.junction_tol && straight && angle_error < tol.junction_angle) {
    return LimitClass::SteinerTree;
  }
  return LimitClass::Undecided;
}

}  // namespace netflow
