#pragma once

// Self-similar expanding solution flowing out of a standard cross.
//
// The expander is Γ(t) = √t · E where E is a tree: a straight bridge on
// the x2-axis between (0, ±b) and four arcs. The first-quadrant arc leaves
// (0, b) at 30° and satisfies κ = <x, ν>/2; b is fixed by requiring the
// arc to be asymptotic to the 60° ray through the origin.

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "netflow/geometry.hpp"

namespace netflow {

struct ExpanderProfile {
  /// Junction height b of the unit-time expander.
  double junction_height = 0.0;
  /// First-quadrant arc of the unit-time expander, from (0, b) outward,
  /// sampled every `ds` in arclength.
  std::vector<Point2> arc;
  double ds = 0.0;
};

namespace detail {

using ExpanderStateVec = std::array<double, 3>;  // x1, x2, tangent angle

inline ExpanderStateVec integrate_expander(double b, double length, double ds,
                                           std::vector<Point2>* trace) {
  namespace odeint = boost::numeric::odeint;
  auto rhs = [](const ExpanderStateVec& z, ExpanderStateVec& dz, double) {
    const double c = std::cos(z[2]);
    const double s = std::sin(z[2]);
    dz[0] = c;
    dz[1] = s;
    dz[2] = 0.5 * (-z[0] * s + z[1] * c);
  };
  ExpanderStateVec z{0.0, b, std::numbers::pi / 6.0};
  auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<ExpanderStateVec>());
  if (trace) trace->push_back({z[0], z[1]});
  const auto steps = static_cast<int>(std::lround(length / ds));
  odeint::integrate_n_steps(stepper, rhs, z, 0.0, ds, steps,
                            [trace](const ExpanderStateVec& y, double s) {
                              if (trace && s > 0.0) trace->push_back({y[0], y[1]});
                            });
  return z;
}

}  // namespace detail

/// Solves the shooting problem for b by bisection and returns the arc
/// sampled up to arclength `length` (the default reaches past radius 14).
inline ExpanderProfile compute_expander(double length = 14.0, double ds = 0.01) {
  const double target = std::numbers::pi / 3.0;
  double lo = 0.0;
  double hi = 4.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto z = detail::integrate_expander(mid, 14.0, 0.05, nullptr);
    (z[2] < target ? lo : hi) = mid;
  }
  ExpanderProfile out;
  out.junction_height = 0.5 * (lo + hi);
  out.ds = ds;
  detail::integrate_expander(out.junction_height, length, ds, &out.arc);
  return out;
}

/// Cached profile at default resolution.
inline const ExpanderProfile& expander() {
  static const ExpanderProfile profile = compute_expander();
  return profile;
}

}  // namespace netflow
