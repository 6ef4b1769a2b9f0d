#pragma once

// Arclength redistribution of polylines.

// pchip.hpp in Boost 1.74 calls unqualified isnan; declare it first.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cstddef>
#include <vector>

#include "netflow/geometry.hpp"

namespace netflow {

/// Cumulative chord length at each vertex (closed curves include the
/// closing segment as a final entry).
inline std::vector<double> chord_parameters(const std::vector<Point2>& pts) {
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + distance(pts[i - 1], pts[i]);
  return s;
}

/// Resamples a polyline at the given chord-length stations using monotone
/// cubic (PCHIP) interpolation of each coordinate. Stations must lie in
/// [0, total length].
inline std::vector<Point2> sample_at(const std::vector<Point2>& pts,
                                     const std::vector<double>& stations) {
  std::vector<double> s = chord_parameters(pts);
  if (pts.size() < 4) {
    // too short for the cubic: piecewise linear
    std::vector<Point2> out;
    for (double q : stations) {
      std::size_t k = 1;
      while (k + 1 < s.size() && s[k] < q) ++k;
      const double w = (q - s[k - 1]) / (s[k] - s[k - 1]);
      out.push_back(pts[k - 1] + w * (pts[k] - pts[k - 1]));
    }
    return out;
  }
  std::vector<double> xs, ys;
  xs.reserve(pts.size());
  ys.reserve(pts.size());
  for (const auto& p : pts) {
    xs.push_back(p.x1);
    ys.push_back(p.x2);
  }
  std::vector<double> s2 = s;
  const double total = s.back();
  using boost::math::interpolators::pchip;
  pchip<std::vector<double>> fx(std::move(s), std::move(xs));
  pchip<std::vector<double>> fy(std::move(s2), std::move(ys));
  std::vector<Point2> out;
  out.reserve(stations.size());
  for (double q : stations) {
    q = std::clamp(q, 0.0, total);
    out.push_back({fx(q), fy(q)});
  }
  return out;
}

/// Redistributes an open polyline to `n` points equally spaced in
/// arclength; the end points are kept exactly.
inline std::vector<Point2> resample_uniform(const std::vector<Point2>& pts, std::size_t n) {
  const double total = chord_parameters(pts).back();
  std::vector<double> stations(n);
  for (std::size_t i = 0; i < n; ++i) {
    stations[i] = total * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  std::vector<Point2> out = sample_at(pts, stations);
  out.front() = pts.front();
  out.back() = pts.back();
  return out;
}

/// Arclength stations for `n` points on [0, total] whose local spacing is
/// min(H, q (d + s)), s measured from the first point: geometric grading
/// toward a junction at distance d from a collision point, uniform spacing
/// H further out. Falls back to uniform when the grading is inactive.
inline std::vector<double> graded_stations(double total, std::size_t n, double d, double q) {
  const double segments = static_cast<double>(n - 1);
  std::vector<double> out(n);
  auto uniform = [&] {
    for (std::size_t i = 0; i < n; ++i) out[i] = total * static_cast<double>(i) / segments;
    return out;
  };
  if (!(q > 0.0) || !(d > 0.0) || q * d >= total / segments) return uniform();
  // number of segments spanned for spacing cap h
  auto count = [&](double h) {
    const double knee = std::min(total, h / q - d);
    if (knee <= 0.0) return total / h;
    return std::log((d + knee) / d) / q + (total - knee) / h;
  };
  double lo = q * d;
  double hi = total / segments;
  if (count(hi) <= segments) return uniform();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) > segments ? lo : hi) = mid;
  }
  const double h = hi;
  const double knee = std::min(total, h / q - d);
  const double inner = std::log((d + knee) / d) / q;
  const double scale = segments / count(h);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = static_cast<double>(i) / scale;
    out[i] = phi <= inner ? d * std::expm1(q * phi) : knee + (phi - inner) * h;
  }
  out.back() = total;
  return out;
}

/// Redistributes an open polyline to `n` points graded toward its first
/// point (see graded_stations); the end points are kept exactly.
inline std::vector<Point2> resample_graded(const std::vector<Point2>& pts, std::size_t n, double d,
                                           double q) {
  const double total = chord_parameters(pts).back();
  std::vector<Point2> out = sample_at(pts, graded_stations(total, n, d, q));
  out.front() = pts.front();
  out.back() = pts.back();
  return out;
}

/// Closed-curve variant: `n` distinct points, starting at pts.front().
inline std::vector<Point2> resample_uniform_closed(const std::vector<Point2>& pts, std::size_t n) {
  std::vector<Point2> loop = pts;
  loop.push_back(pts.front());
  const double total = chord_parameters(loop).back();
  std::vector<double> stations(n);
  for (std::size_t i = 0; i < n; ++i) {
    stations[i] = total * static_cast<double>(i) / static_cast<double>(n);
  }
  std::vector<Point2> out = sample_at(loop, stations);
  out.front() = pts.front();
  return out;
}

}  // namespace netflow
