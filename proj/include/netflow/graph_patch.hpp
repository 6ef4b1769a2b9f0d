#pragma once

// Independent solver near a junction on the x2-axis: the defining curve as
// a graph x2 = u(x1) over [0, eps], evolving by
//   u_t = u_xx / (1 + u_x²) = (arctan u_x)_x
// with u_x(0) = 1/√3 and Dirichlet data on the right.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "netflow/geometry.hpp"
#include "netflow/linalg.hpp"

namespace netflow {

struct GraphPatch {
  /// Values at x_j = j * eps / (u.size() - 1).
  std::vector<double> u;
  double eps = 0.0;
  double slope_bc = 1.0 / std::numbers::sqrt3;
  /// Slope of the comparison line ℓ.
  double m = 1.0;
  double t = 0.0;
  /// |u_x| beyond which the graph representation is considered lost.
  double slope_bound = 1e2;

  std::size_t size() const { return u.size(); }
  double spacing() const { return eps / static_cast<double>(u.size() - 1); }
  double x(std::size_t j) const { return spacing() * static_cast<double>(j); }

  /// w = u - m x at the nodes.
  std::vector<double> w() const {
    std::vector<double> out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j] - m * x(j);
    return out;
  }

  double max_slope() const {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < u.size(); ++j) {
      s = std::max(s, std::abs(u[j + 1] - u[j]) / spacing());
    }
    return s;
  }

  /// Integral of u over the control volumes of the unknown nodes,
  /// [0, eps - h/2].
  double mass() const {
    const double h = spacing();
    double s = 0.5 * h * u[0];
    for (std::size_t j = 1; j + 1 < u.size(); ++j) s += h * u[j];
    return s;
  }

  void validate() const {
    if (u.size() < 3) throw ContractError("graph patch needs at least 3 nodes");
    if (!(eps > 0.0)) throw ContractError("graph patch width must be positive");
    if (!(m > 1.0 / std::numbers::sqrt3 && m < std::numbers::sqrt3)) {
      throw ContractError("comparison slope must lie in (1/sqrt(3), sqrt(3))");
    }
    for (double v : u) {
      if (!std::isfinite(v)) throw GeometryError("graph patch holds non-finite values");
    }
    if (max_slope() > slope_bound) throw GeometryError("graph representation lost: slope bound exceeded");
  }
};

namespace detail {

/// Secant of arctan between the slopes m and s; the face flux is
/// arctan(m) + β (s' - m), exact at s' = s.
inline double arctan_secant(double s, double m) {
  const double d = s - m;
  const double q = 1.0 + s * m;
  if (q <= 0.0) return (std::atan(s) - std::atan(m)) / d;
  if (std::abs(d) < 1e-8 * q) return 1.0 / q;
  return std::atan(d / q) / d;
}

}  // namespace detail

/// One linearly implicit finite-volume step. Face fluxes are lagged
/// secants of arctan through the line slope m, so the update of w = u - m x
/// is an M-matrix and w stays positive when its data are. The node 0 control
/// volume is a half cell receiving the Neumann flux arctan(1/√3) = π/6.
inline GraphPatch graph_patch_step(const GraphPatch& patch, double dt,
                                   std::optional<double> right_value = std::nullopt) {
  patch.validate();
  if (!(dt > 0.0)) throw ContractError("dt must be positive");
  const std::size_t n = patch.size() - 1;  // unknowns 0..n-1, node n Dirichlet
  const double h = patch.spacing();
  const double m = patch.m;
  const double ub = right_value.value_or(patch.u.back());
  const double left_flux = std::atan(patch.slope_bc);

  // face j+1/2 between nodes j and j+1, j = 0..n-1
  std::vector<double> beta(n), base(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = (patch.u[j + 1] - patch.u[j]) / h;
    beta[j] = detail::arctan_secant(s, m);
    base[j] = std::atan(m) - beta[j] * m;
  }

  std::vector<double> sub(n - 1, 0.0), diag(n, 0.0), sup(n - 1, 0.0), rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double vol = (j == 0 ? 0.5 : 1.0) * h;
    diag[j] = vol / dt + beta[j] / h;
    rhs[j] = vol / dt * patch.u[j] + base[j];
    if (j + 1 < n) {
      sup[j] = -beta[j] / h;
    } else {
      rhs[j] += beta[j] / h * ub;
    }
    if (j == 0) {
      rhs[j] -= left_flux;
    } else {
      diag[j] += beta[j - 1] / h;
      sub[j - 1] = -beta[j - 1] / h;
      rhs[j] -= base[j - 1];
    }
  }
  linalg::solve_tridiagonal(std::move(sub), std::move(diag), std::move(sup), rhs);

  GraphPatch out = patch;
  for (std::size_t j = 0; j < n; ++j) out.u[j] = rhs[j];
  out.u[n] = ub;
  out.t = patch.t + dt;
  out.validate();
  return out;
}

/// Height of the curve above abscissa x: the first crossing of the
/// vertical line x1 = x along the curve from its first point.
inline std::optional<double> graph_height(const DiscreteCurve& c, double x) {
  if (x <= c[0].x1) return c[0].x2;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const Point2 a = c[i];
    const Point2 b = c[i + 1];
    if ((a.x1 - x) * (b.x1 - x) <= 0.0 && a.x1 != b.x1) {
      const double w = (x - a.x1) / (b.x1 - a.x1);
      return a.x2 + w * (b.x2 - a.x2);
    }
  }
  return std::nullopt;
}

/// Graph patch over [0, eps] sampled from a network whose junction lies on
/// the x2-axis. The curve must be a graph over that interval (x1 increasing
/// from the junction past eps).
inline GraphPatch patch_from_network(const SymmetricNetwork& net, double eps, std::size_t nodes,
                                     double m, double t) {
  if (net.junction_axis != Axis::X2) throw ContractError("graph patch needs the junction on the x2-axis");
  const auto& c = net.defining;
  std::size_t i = 0;
  while (i + 1 < c.size() && c[i].x1 <= eps) {
    if (c[i + 1].x1 <= c[i].x1) throw ContractError("curve is not a graph over the patch");
    ++i;
  }
  if (c[i].x1 <= eps) throw ContractError("patch is wider than the curve");
  GraphPatch p;
  p.eps = eps;
  p.m = m;
  p.t = t;
  p.u.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    p.u[j] = *graph_height(c, eps * static_cast<double>(j) / static_cast<double>(nodes - 1));
  }
  p.validate();
  return p;
}

}  // namespace netflow
