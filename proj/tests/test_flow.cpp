#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "netflow/expander.hpp"
#include "netflow/flow.hpp"
#include "netflow/linalg.hpp"
#include "netflow/presets.hpp"

using namespace netflow;
using std::numbers::pi;

namespace {

ClosedCurveState circle(int n, double r) {
  std::vector<Point2> p;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * pi * i / n;
    p.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return {DiscreteCurve(p, true), 0.0};
}

// Straight tree edge from a junction on the x1-axis along the 60° ray.
SymmetricNetwork straight_tree(int n) {
  const Point2 j{0.5, 0.0};
  const Point2 p = j + 1.5 * junction_tangent(NetworkType::Tree, Axis::X1);
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back(j + (static_cast<double>(i) / (n - 1)) * (p - j));
  return {DiscreteCurve(pts, false), NetworkType::Tree, Axis::X1, p};
}

}  // namespace

TEST(Linalg, TridiagonalMatchesKnownSolution) {
  // -x'' = 2 on [0,1], x(0)=x(1)=0, 4 interior nodes: exact at the nodes
  const int n = 4;
  const double h = 0.2;
  std::vector<double> sub(n - 1, -1.0), diag(n, 2.0), sup(n - 1, -1.0), rhs(n, 2.0 * h * h);
  linalg::solve_tridiagonal(sub, diag, sup, rhs);
  for (int i = 0; i < n; ++i) {
    const double x = h * (i + 1);
    EXPECT_NEAR(rhs[i], x * (1.0 - x), 1e-14);
  }
}

TEST(Linalg, CyclicTridiagonalResidual) {
  const std::size_t n = 7;
  std::vector<double> lo(n, -1.0), di(n, 3.0), up(n, -0.5), b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = std::sin(1.0 + i);
  const auto x = linalg::solve_cyclic_tridiagonal(lo, di, up, b);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = lo[i] * x[(i + n - 1) % n] + di[i] * x[i] + up[i] * x[(i + 1) % n];
    EXPECT_NEAR(r, b[i], 1e-13);
  }
}

TEST(Linalg, BandMatrixSolve) {
  linalg::BandMatrix a(5, 2, 3);
  for (int i = 0; i < 5; ++i) {
    a.add(i, i, 4.0);
    if (i + 3 < 5) a.add(i, i + 3, 1.0);
    if (i >= 2) a.add(i, i - 2, -1.0);
  }
  std::vector<double> x{1, 2, 3, 4, 5}, b(5, 0.0);
  for (int i = 0; i < 5; ++i) {
    b[i] = 4.0 * x[i] + (i + 3 < 5 ? x[i + 3] : 0.0) - (i >= 2 ? x[i - 2] : 0.0);
  }
  a.solve(b);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(b[i], x[i], 1e-13);
}

TEST(SolverConfig, ValidatesRanges) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.cfl = 1.5;
  EXPECT_THROW(c.validate(), ContractError);
  c = SolverConfig{};
  c.junction_tol = 1e-12;
  EXPECT_THROW(c.validate(), ContractError);
  c = SolverConfig{};
  c.respacing_interval = 0;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(SolverConfig, DefaultsScaleWithDiameter) {
  const auto a = SolverConfig::for_network(build_preset(NetworkType::Theta, 1.0));
  const auto b = SolverConfig::for_network(build_preset(NetworkType::Theta, 2.0));
  EXPECT_NEAR(b.junction_tol / a.junction_tol, 2.0, 1e-9);
  EXPECT_NEAR(b.dt_max / a.dt_max, 4.0, 1e-9);
  EXPECT_NEAR(b.kappa_blowup / a.kappa_blowup, 0.5, 1e-9);
  EXPECT_DOUBLE_EQ(a.delta0(), 5.0 * a.junction_tol);
}

TEST(Timestep, BoundedByCapAndSpacing) {
  SolverConfig c;
  c.dt_max = 1e-3;
  EXPECT_LE(choose_dt(c, 1.0, 1.0, 0.0), 1e-3);
  EXPECT_LT(choose_dt(c, 1e-3, 1.0, 10.0), 1e-4);
}

TEST(ClosedCurve, CircleShrinksAtExactRate) {
  auto s = circle(200, 1.0);
  SolverConfig cfg;
  cfg.n_points = 200;
  double err = 0.0;
  while (s.t < 0.2) {
    s = step_closed(s, cfg);
    const double r = std::sqrt(1.0 - 2.0 * s.t);
    for (const auto& p : s.curve.points()) err = std::max(err, std::abs(norm(p) - r) / r);
  }
  EXPECT_LT(err, 2e-3);
}

TEST(Flow, StraightTreeIsStationary) {
  const auto net = straight_tree(50);
  auto cfg = SolverConfig::for_network(net, 50);
  auto s = initial_state(net, cfg);
  const Point2 j0 = net.junction();
  const Point2 dir = junction_tangent(NetworkType::Tree, Axis::X1);
  for (int k = 0; k < 1000; ++k) s = step(s, cfg);
  for (const auto& p : s.net.defining.points()) EXPECT_LT(std::abs(cross(dir, p - j0)), 1e-10);
  EXPECT_LT(distance(s.net.junction(), j0), 1e-10);
  EXPECT_EQ(s.net.defining.back().x1, net.anchor->x1);
}

TEST(Flow, StepKeepsBoundaryConditions) {
  for (auto t : {NetworkType::Theta, NetworkType::Eyeglasses, NetworkType::Lens, NetworkType::Tree}) {
    const auto net = build_preset(t);
    auto cfg = SolverConfig::for_network(net, 100);
    auto s = initial_state(net, cfg);
    for (int k = 0; k < 200; ++k) s = step(s, cfg);
    EXPECT_GT(s.t, 0.0);
    EXPECT_EQ(s.steps, 200u);
    EXPECT_TRUE(check_invariants(s.net, {1e-9, 0.1, 0.0}).empty()) << to_string(t);
    const Point2 e = s.net.defining.back();
    switch (t) {
      case NetworkType::Tree: EXPECT_EQ(e.x1, net.anchor->x1); break;
      case NetworkType::Eyeglasses: EXPECT_EQ(off(s.net.junction_axis, e), 0.0); break;
      default: EXPECT_EQ(along(s.net.junction_axis, e), 0.0); break;
    }
  }
}

TEST(Flow, JunctionObeysHerringAngle) {
  const auto net = build_preset(NetworkType::Theta);
  auto cfg = SolverConfig::for_network(net, 200);
  auto s = initial_state(net, cfg);
  for (int k = 0; k < 500; ++k) s = step(s, cfg);
  const Point2 tangent = ghost_junction_tangent(s.net);
  EXPECT_LT(angle_between(tangent, junction_tangent(NetworkType::Theta, s.net.junction_axis)), 1e-2);
}

TEST(Flow, ThetaJunctionsCollide) {
  const auto net = build_preset(NetworkType::Theta);
  auto cfg = SolverConfig::for_network(net, 100);
  const auto r = run_until_event(initial_state(net, cfg), cfg);
  EXPECT_EQ(r.event, EventKind::Type0);
  EXPECT_LT(r.state.net.junction_distance(), cfg.junction_tol);
  const double ts = estimate_singular_time(r.state);
  EXPECT_GE(ts, r.state.t);
  EXPECT_LT(ts - r.state.t, 0.05 * r.state.t);
}

TEST(Flow, LensCollapseIsBlowup) {
  const auto net = build_preset(NetworkType::Lens);
  auto cfg = SolverConfig::for_network(net, 60);
  EXPECT_EQ(run_until_event(initial_state(net, cfg), cfg).event, EventKind::Blowup);
}

TEST(Flow, TimeCapStopsTheRun) {
  const auto net = build_preset(NetworkType::Tree);
  auto cfg = SolverConfig::for_network(net, 50);
  cfg.t_max = 0.01;
  const auto r = run_until_event(initial_state(net, cfg), cfg);
  EXPECT_EQ(r.event, EventKind::TimeCap);
  EXPECT_GE(r.state.t, 0.01);
}

TEST(EventKinds, RoundTrip) {
  for (auto k : {EventKind::Type0, EventKind::Blowup, EventKind::Converged, EventKind::TimeCap}) {
    EXPECT_EQ(parse_event_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_event_kind("boom"), std::invalid_argument);
}

// b from shooting on κ = <x, ν>/2 with a 30° start and a 60° asymptote.
TEST(Expander, JunctionHeight) { EXPECT_NEAR(expander().junction_height, 0.9378017104, 1e-8); }

TEST(Expander, ProfileSolvesSelfSimilarEquation) {
  const auto& e = expander();
  const auto& a = e.arc;
  ASSERT_GT(a.size(), 1000u);
  // the first chord leans by half a step of the initial curvature b cos(π/6) / 2
  const double kappa0 = 0.5 * e.junction_height * std::cos(pi / 6.0);
  EXPECT_NEAR(angle_of(a[1] - a[0]), pi / 6.0 + 0.5 * e.ds * kappa0, 1e-5);
  for (std::size_t i = 10; i + 10 < a.size(); i += 97) {
    const Point2 d1 = (a[i + 1] - a[i - 1]) / (2.0 * e.ds);
    const Point2 d2 = (a[i + 1] - 2.0 * a[i] + a[i - 1]) / (e.ds * e.ds);
    const double kappa = cross(d1, d2);
    const Point2 normal{-d1.x2, d1.x1};
    EXPECT_NEAR(kappa, 0.5 * dot(a[i], normal), 1e-4);
  }
  const Point2 far = a.back();
  EXPECT_NEAR(angle_of(far), pi / 3.0, 1e-4);
}
