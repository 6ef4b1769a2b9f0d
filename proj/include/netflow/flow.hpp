#pragma once

// Front-tracking curvature flow of the defining curve of a symmetric
// network, with the junction, pinned-anchor and free-endpoint boundary
// regimes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netflow/geometry.hpp"
#include "netflow/linalg.hpp"
#include "netflow/resample.hpp"

namespace netflow {

enum class Scheme {
  /// Backward Euler in the positions with the stencil weights taken from
  /// the current geometry.
  SemiImplicit,
  Explicit,
};

struct SolverConfig {
  int n_points = 200;
  double dt_max = 1e-3;
  double cfl = 0.1;
  int respacing_interval = 10;
  double geom_tol = 1e-9;
  /// Junction distance to the origin below which junctions have collided.
  double junction_tol = 1e-3;
  double kappa_blowup = 1e3;
  double t_max = 100.0;
  Scheme scheme = Scheme::SemiImplicit;
  /// Max normal speed below which the flow counts as at rest ...
  double rest_speed = 1e-6;
  /// ... for this many consecutive steps.
  int rest_steps = 100;
  /// Junction distance placed by a standard transition; 0 selects
  /// 5 * junction_tol.
  double restart_scale = 0.0;
  /// Spacing near the junction is capped by this fraction of the distance
  /// to the origin (plus arclength), so collisions and restarts stay
  /// resolved; 0 keeps the spacing uniform.
  double junction_grading = 0.1;

  double delta0() const { return restart_scale > 0.0 ? restart_scale : 5.0 * junction_tol; }

  void validate() const {
    if (n_points < 8) throw ContractError("n_points must be at least 8");
    if (!(dt_max > 0.0)) throw ContractError("dt_max must be positive");
    if (!(cfl > 0.0 && cfl < 1.0)) throw ContractError("cfl must lie in (0, 1)");
    if (respacing_interval < 1) throw ContractError("respacing_interval must be positive");
    if (!(geom_tol > 0.0 && junction_tol > 0.0 && kappa_blowup > 0.0 && t_max > 0.0)) {
      throw ContractError("tolerances and caps must be positive");
    }
    if (!(junction_tol > 100.0 * geom_tol)) {
      throw ContractError("junction_tol must dominate geom_tol");
    }
    if (!(rest_speed > 0.0) || rest_steps < 1) throw ContractError("bad rest criterion");
    if (!(junction_grading >= 0.0 && junction_grading < 1.0)) {
      throw ContractError("junction_grading must lie in [0, 1)");
    }
  }

  /// Defaults scaled by the diameter D of the reconstructed network.
  static SolverConfig for_network(const SymmetricNetwork& net, int n_points = 200) {
    const double d = network_diameter(net);
    SolverConfig cfg;
    cfg.n_points = n_points;
    cfg.geom_tol = 1e-9 * d;
    cfg.junction_tol = 1e-3 * d;
    cfg.kappa_blowup = 1e3 / d;
    cfg.rest_speed = 1e-6 / d;
    cfg.dt_max = 1e-3 * d * d;
    cfg.t_max = 10.0 * d * d;
    return cfg;
  }
};

struct SymmetricState {
  SymmetricNetwork net;
  double t = 0.0;
  std::uint64_t steps = 0;
};

/// Thrown when a step leaves the admissible set; carries both states.
class SolverAbort : public std::runtime_error {
 public:
  SolverAbort(const std::string& what, SymmetricState before, std::vector<Point2> attempted)
      : std::runtime_error(what), before_(std::move(before)), attempted_(std::move(attempted)) {}
  const SymmetricState& before() const { return before_; }
  const std::vector<Point2>& attempted() const { return attempted_; }

 private:
  SymmetricState before_;
  std::vector<Point2> attempted_;
};

// ---------------------------------------------------------------------------
// Discrete operators
// ---------------------------------------------------------------------------

namespace detail {

inline Point2 junction_normal(const SymmetricNetwork& net) {
  return rotate90(junction_tangent(net.type, net.junction_axis));
}

/// Normal curvature at the junction from the ghost point that makes the
/// centered tangent equal the prescribed junction tangent: the circle
/// through x0 tangent to it and through x1.
inline double junction_curvature(const SymmetricNetwork& net) {
  const auto& c = net.defining;
  const Point2 d = c[1] - c[0];
  return 2.0 * dot(d, junction_normal(net)) / dot(d, d);
}

/// Curvature at a free endpoint using the mirror ghost across its axis.
inline double free_end_curvature(const SymmetricNetwork& net) {
  const auto& c = net.defining;
  const std::size_t n = c.size();
  const Axis e = endpoint_axis(net.type, net.junction_axis);
  const Point2 prev = c[n - 2];
  const Point2 proj = along(e, prev) * unit(e);
  const double h = distance(prev, c[n - 1]);
  const Point2 lap = (2.0 / (h * h)) * (proj - c[n - 1]);
  return dot(lap, rotate90(endpoint_tangent(net.type, net.junction_axis)));
}

}  // namespace detail

/// Curvature at each node as the stepper sees it (boundary nodes use the
/// ghost constructions; a pinned anchor reports 0 because it never moves).
inline std::vector<double> nodal_curvature(const SymmetricNetwork& net) {
  const auto& c = net.defining;
  const std::size_t n = c.size();
  std::vector<double> k(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Point2 t = normalized(detail::centered_derivative(c[i - 1], c[i], c[i + 1]));
    k[i] = dot(detail::second_difference(c[i - 1], c[i], c[i + 1]), rotate90(t));
  }
  k[0] = detail::junction_curvature(net);
  if (net.type != NetworkType::Tree) k[n - 1] = detail::free_end_curvature(net);
  return k;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Velocity of the junction along its axis (positive = away from origin).
inline double junction_velocity(const SymmetricNetwork& net) {
  const double c = dot(unit(net.junction_axis), detail::junction_normal(net));
  return detail::junction_curvature(net) / c;
}

/// Discrete junction tangent implied by the ghost construction: the chord
/// from the ghost point to x1.
inline Point2 ghost_junction_tangent(const SymmetricNetwork& net) {
  const auto& c = net.defining;
  const Point2 tau = junction_tangent(net.type, net.junction_axis);
  const Point2 ghost = c[1] - 2.0 * dot(c[1] - c[0], tau) * tau;
  return normalized(c[1] - ghost);
}

/// Linear velocity field V = K z of the semi-discrete flow, with
/// z = (x1_0, x2_0, x1_1, ...). Constrained coordinates are reported
/// separately as fixed values.
struct LinearVelocity {
  struct Entry {
    int row, col;
    double v;
  };
  std::vector<Entry> k;
  std::vector<std::pair<int, double>> fixed;
};

inline LinearVelocity assemble_velocity(const SymmetricNetwork& net) {
  const auto& c = net.defining;
  const int n = static_cast<int>(c.size());
  LinearVelocity out;
  auto idx = [](int node, int coord) { return 2 * node + coord; };
  std::vector<double> h(n - 1);
  for (int i = 0; i + 1 < n; ++i) h[i] = distance(c[i], c[i + 1]);

  for (int i = 1; i + 1 < n; ++i) {
    const double w = 2.0 / (h[i - 1] + h[i]);
    for (int k = 0; k < 2; ++k) {
      out.k.push_back({idx(i, k), idx(i + 1, k), w / h[i]});
      out.k.push_back({idx(i, k), idx(i, k), -w / h[i] - w / h[i - 1]});
      out.k.push_back({idx(i, k), idx(i - 1, k), w / h[i - 1]});
    }
  }

  // junction: moves along its axis with normal speed equal to the ghost
  // curvature; x0 = a e, so a' = 2/(c h^2) <x1, nu> - 2/h^2 a
  {
    const Axis ax = net.junction_axis;
    const Point2 nu = detail::junction_normal(net);
    const double cax = dot(unit(ax), nu);
    const int a = idx(0, ax == Axis::X1 ? 0 : 1);
    const int o = idx(0, ax == Axis::X1 ? 1 : 0);
    const double g = 2.0 / (h[0] * h[0]);
    out.k.push_back({a, idx(1, 0), g * nu.x1 / cax});
    out.k.push_back({a, idx(1, 1), g * nu.x2 / cax});
    out.k.push_back({a, a, -g});
    out.fixed.emplace_back(o, 0.0);
  }

  if (net.type == NetworkType::Tree) {
    out.fixed.emplace_back(idx(n - 1, 0), net.anchor->x1);
    out.fixed.emplace_back(idx(n - 1, 1), net.anchor->x2);
  } else {
    const Axis e = endpoint_axis(net.type, net.junction_axis);
    const int p = idx(n - 1, e == Axis::X1 ? 0 : 1);
    const int o = idx(n - 1, e == Axis::X1 ? 1 : 0);
    const int q = idx(n - 2, e == Axis::X1 ? 0 : 1);
    const double g = 2.0 / (h[n - 2] * h[n - 2]);
    out.k.push_back({p, q, g});
    out.k.push_back({p, p, -g});
    out.fixed.emplace_back(o, 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

/// Adaptive timestep. The semi-implicit scheme is stable for any step, so
/// it is limited by accuracy: dt = cfl h/(max|κ| + 1/L). The explicit scheme
/// keeps the parabolic restriction cfl h²/(2 (1 + max|κ| h)).
inline double choose_dt(const SolverConfig& cfg, double h_min, double length, double kmax) {
  if (cfg.scheme == Scheme::Explicit) {
    return std::min(cfg.dt_max, 0.5 * cfg.cfl * h_min * h_min / (1.0 + kmax * h_min));
  }
  return std::min(cfg.dt_max, cfg.cfl * h_min / (kmax + 1.0 / length));
}

inline std::vector<Point2> advance_positions(const SymmetricNetwork& net, const SolverConfig& cfg,
                                             double dt) {
  const auto& c = net.defining;
  const int n = static_cast<int>(c.size());
  const LinearVelocity vel = assemble_velocity(net);
  std::vector<double> z(2 * n);
  for (int i = 0; i < n; ++i) {
    z[2 * i] = c[i].x1;
    z[2 * i + 1] = c[i].x2;
  }
  std::vector<double> next;
  if (cfg.scheme == Scheme::Explicit) {
    next = z;
    for (const auto& e : vel.k) next[e.row] += dt * e.v * z[e.col];
    for (const auto& [row, value] : vel.fixed) next[row] = value;
  } else {
    linalg::BandMatrix a(2 * n, 2, 3);
    std::vector<bool> pinned(2 * n, false);
    for (const auto& [row, value] : vel.fixed) {
      pinned[row] = true;
      z[row] = value;
    }
    for (int r = 0; r < 2 * n; ++r) a.add(r, r, 1.0);
    for (const auto& e : vel.k) {
      if (!pinned[e.row]) a.add(e.row, e.col, -dt * e.v);
    }
    next = z;
    a.solve(next);
  }
  std::vector<Point2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = {next[2 * i], next[2 * i + 1]};
  return pts;
}

/// Redistributes the defining curve: uniform in arclength, graded toward
/// the junction when it is near the origin.
inline DiscreteCurve respace(const SymmetricNetwork& net, const SolverConfig& cfg, std::size_t n) {
  return DiscreteCurve(
      resample_graded(net.defining.points(), n, net.junction_distance(), cfg.junction_grading),
      false);
}

/// Builds the initial state: the defining curve redistributed to
/// cfg.n_points points.
inline SymmetricState initial_state(SymmetricNetwork net, const SolverConfig& cfg, double t0 = 0.0) {
  cfg.validate();
  net.defining = respace(net, cfg, static_cast<std::size_t>(cfg.n_points));
  return {std::move(net), t0, 0};
}

struct StepInfo {
  double dt = 0.0;
  double max_kappa = 0.0;
  double max_speed = 0.0;
  double junction_distance = 0.0;
};

/// Advances the state by one adaptive step.
inline SymmetricState step(const SymmetricState& state, const SolverConfig& cfg,
                           StepInfo* info = nullptr) {
  const auto& net = state.net;
  const auto& c = net.defining;
  const auto kappa = nodal_curvature(net);
  const double kmax = max_abs(kappa);
  double dt = choose_dt(cfg, c.min_segment_length(), c.length(), kmax);

  // approach the origin geometrically instead of jumping past it
  const double a = along(net.junction_axis, net.junction());
  const double v = junction_velocity(net);
  if (v < 0.0) dt = std::min(dt, 0.5 * a / -v);

  std::vector<Point2> pts;
  for (int attempt = 0;; ++attempt) {
    pts = advance_positions(net, cfg, dt);
    if (along(net.junction_axis, pts.front()) > 0.0) break;
    if (attempt > 30) throw SolverAbort("junction crossed the origin", state, pts);
    dt *= 0.5;
  }

  SymmetricState out{net, state.t + dt, state.steps + 1};
  try {
    out.net.defining = DiscreteCurve(pts, false);
  } catch (const GeometryError& e) {
    throw SolverAbort(std::string("step produced a degenerate curve: ") + e.what(), state, pts);
  }
  for (const auto& p : pts) {
    if (p.x1 < -cfg.geom_tol || p.x2 < -cfg.geom_tol) {
      throw SolverAbort("curve left the first quadrant", state, pts);
    }
  }
  if (!is_simple(out.net.defining, cfg.geom_tol)) {
    throw SolverAbort("curve self-intersects", state, pts);
  }
  if (out.steps % static_cast<std::uint64_t>(cfg.respacing_interval) == 0) {
    out.net.defining = respace(out.net, cfg, c.size());
  }
  if (info) {
    const auto k = nodal_curvature(out.net);
    info->dt = dt;
    info->max_kappa = max_abs(k);
    info->max_speed = info->max_kappa;
    info->junction_distance = out.net.junction_distance();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed curves (no junctions) for solver verification
// ---------------------------------------------------------------------------

struct ClosedCurveState {
  DiscreteCurve curve;
  double t = 0.0;
};

inline ClosedCurveState step_closed(const ClosedCurveState& state, const SolverConfig& cfg) {
  const auto& c = state.curve;
  const std::size_t n = c.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = c.segment_length(i);
  double kmax = 0.0;
  for (const auto& f : derived_quantities(c)) kmax = std::max(kmax, std::abs(f.curvature));
  const double dt = choose_dt(cfg, c.min_segment_length(), c.length(), kmax);

  std::vector<double> lower(n), diag(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hm = h[(i + n - 1) % n];
    const double hp = h[i];
    const double w = 2.0 / (hm + hp);
    lower[i] = w / hm;
    upper[i] = w / hp;
    diag[i] = -w / hm - w / hp;
  }
  std::vector<Point2> pts(n);
  for (int k = 0; k < 2; ++k) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = k == 0 ? c[i].x1 : c[i].x2;
    std::vector<double> next(n);
    if (cfg.scheme == Scheme::Explicit) {
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = z[i] + dt * (lower[i] * z[(i + n - 1) % n] + diag[i] * z[i] +
                               upper[i] * z[(i + 1) % n]);
      }
    } else {
      std::vector<double> lo(n), di(n), up(n);
      for (std::size_t i = 0; i < n; ++i) {
        lo[i] = -dt * lower[i];
        di[i] = 1.0 - dt * diag[i];
        up[i] = -dt * upper[i];
      }
      next = linalg::solve_cyclic_tridiagonal(lo, di, up, z);
    }
    for (std::size_t i = 0; i < n; ++i) (k == 0 ? pts[i].x1 : pts[i].x2) = next[i];
  }
  return {DiscreteCurve(std::move(pts), true), state.t + dt};
}

// ---------------------------------------------------------------------------
// Running to the next event
// ---------------------------------------------------------------------------

enum class EventKind { Type0, Blowup, Converged, TimeCap };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Type0: return "type0";
    case EventKind::Blowup: return "blowup";
    case EventKind::Converged: return "converged";
    case EventKind::TimeCap: return "timecap";
  }
  return "?";
}

inline EventKind parse_event_kind(std::string_view s) {
  if (s == "type0") return EventKind::Type0;
  if (s == "blowup") return EventKind::Blowup;
  if (s == "converged") return EventKind::Converged;
  if (s == "timecap") return EventKind::TimeCap;
  throw std::invalid_argument("unknown event kind: " + std::string(s));
}

struct RunResult {
  SymmetricState state;
  EventKind event;
};

using StepObserver = std::function<void(const SymmetricState&, const StepInfo&)>;

/// Steps until the junctions collide with bounded curvature (Type0), the
/// curvature reaches kappa_blowup (Blowup), the flow comes to rest
/// (Converged) or the time cap is hit. For the lens the two curves joining
/// the junctions bound its region, so a collision there is a collapse of
/// that region and reported as Blowup.
inline RunResult run_until_event(SymmetricState state, const SolverConfig& cfg,
                                 const StepObserver& observer = {}) {
  cfg.validate();
  int quiet = 0;
  while (true) {
    StepInfo info;
    state = step(state, cfg, &info);
    if (observer) observer(state, info);
    if (info.max_kappa >= cfg.kappa_blowup) return {std::move(state), EventKind::Blowup};
    if (info.junction_distance < cfg.junction_tol) {
      const auto kind = state.net.type == NetworkType::Lens ? EventKind::Blowup : EventKind::Type0;
      return {std::move(state), kind};
    }
    quiet = info.max_speed < cfg.rest_speed ? quiet + 1 : 0;
    if (quiet >= cfg.rest_steps) return {std::move(state), EventKind::Converged};
    if (state.t >= cfg.t_max) return {std::move(state), EventKind::TimeCap};
  }
}

/// Linear extrapolation of the collision time from the current junction
/// speed toward the origin.
inline double estimate_singular_time(const SymmetricState& state) {
  const double a = along(state.net.junction_axis, state.net.junction());
  const double v = junction_velocity(state.net);
  if (v >= 0.0) return state.t;
  return state.t + a / -v;
}

}  // namespace netflow
