#pragma once

// Initial networks for the four symmetric two-junction topologies. All
// presets put the junction on the x1-axis.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "netflow/geometry.hpp"
#include "netflow/resample.hpp"

namespace netflow {

namespace detail {

/// Samples the graph x -> (x, f(x)) on [x0, x1], clustering samples
/// toward x1 where the profiles below have square-root endpoints.
inline std::vector<Point2> sample_graph(const std::function<double(double)>& f, double x0,
                                        double x1, bool cluster_end, int samples = 4000) {
  std::vector<Point2> pts;
  pts.reserve(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    const double s = static_cast<double>(i) / samples;
    const double u = cluster_end ? 1.0 - (1.0 - s) * (1.0 - s) : s;
    const double x = x0 + (x1 - x0) * u;
    pts.push_back({x, f(x)});
  }
  return pts;
}

inline std::vector<Point2> scaled(std::vector<Point2> pts, double scale) {
  for (auto& p : pts) p = scale * p;
  return pts;
}

}  // namespace detail

/// Anchor of the default tree preset (before scaling).
inline Point2 default_tree_anchor() {
  const double u = 1.5;
  return {2.0, std::sqrt(3.0) * u * (u * u * u - 1.75 * u * u + 1.0)};
}

/// Initial network for `type`, with n_samples equally spaced points.
/// `anchor` (trees only) overrides the default endpoint; it is used
/// unscaled.
inline SymmetricNetwork build_preset(NetworkType type, double scale = 1.0,
                                     std::optional<Point2> anchor = std::nullopt,
                                     std::size_t n_samples = 400) {
  if (!(scale > 0.0)) throw ContractError("preset scale must be positive");
  const double r3 = std::sqrt(3.0);
  std::vector<Point2> pts;
  std::optional<Point2> net_anchor;
  switch (type) {
    case NetworkType::Tree: {
      if (!anchor) {
        // quartic bending away from the straight Steiner edge
        pts = detail::sample_graph(
            [r3](double x) {
              const double u = x - 0.5;
              return r3 * u * (u * u * u - 1.75 * u * u + 1.0);
            },
            0.5, 2.0, false);
        pts = detail::scaled(std::move(pts), scale);
        net_anchor = pts.back();
      } else {
        if (!(anchor->x1 > 0.0 && anchor->x2 > 0.0)) {
          throw ContractError("tree anchor must lie in the open first quadrant");
        }
        // junction halfway to the anchor abscissa, quadratic graph with the
        // 60 degree junction slope
        const Point2 p = *anchor;
        const double a0 = 0.5 * p.x1;
        const double span = p.x1 - a0;
        const double k = (p.x2 - r3 * span) / (span * span);
        pts = detail::sample_graph(
            [=](double x) { return r3 * (x - a0) + k * (x - a0) * (x - a0); }, a0, p.x1, false);
        pts.back() = p;
        net_anchor = p;
      }
      break;
    }
    case NetworkType::Lens: {
      pts = detail::sample_graph([r3](double x) { return 0.5 * r3 * (1.0 - x * x); }, 1.0, 0.0,
                                 false);
      pts = detail::scaled(std::move(pts), scale);
      break;
    }
    case NetworkType::Theta: {
      // the profile c (x + 0.2) sqrt(2 - x) with its junction on the x2-axis,
      // reflected across the diagonal; c makes the junction slope 1/sqrt(3).
      // A short bridge keeps the collision well before the regions vanish.
      const double beta = 0.2;
      const double c = (1.0 / r3) / (std::sqrt(2.0) - beta / (2.0 * std::sqrt(2.0)));
      pts = detail::sample_graph(
          [=](double x) { return c * (x + beta) * std::sqrt(std::max(0.0, 2.0 - x)); }, 0.0, 2.0,
          true);
      for (auto& p : pts) p = swapped(p);
      pts.back() = {0.0, 2.0};
      pts = detail::scaled(std::move(pts), scale);
      break;
    }
    case NetworkType::Eyeglasses: {
      pts = detail::sample_graph(
          [](double x) { return (x - 0.5) * std::sqrt(std::max(0.0, 4.0 - 2.0 * x)); }, 0.5, 2.0,
          true);
      pts.back() = {2.0, 0.0};
      pts = detail::scaled(std::move(pts), scale);
      break;
    }
  }
  SymmetricNetwork net{DiscreteCurve(resample_uniform(pts, n_samples), false), type, Axis::X1,
                       net_anchor};
  return net;
}

}  // namespace netflow
