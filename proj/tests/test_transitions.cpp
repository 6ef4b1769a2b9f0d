#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "netflow/flow.hpp"
#include "netflow/presets.hpp"
#include "netflow/transitions.hpp"

using namespace netflow;
using std::numbers::pi;

namespace {

SymmetricNetwork straight_tree(Point2 junction, Point2 anchor, int n = 40) {
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back(junction + (static_cast<double>(i) / (n - 1)) * (anchor - junction));
  return {DiscreteCurve(pts, false), NetworkType::Tree, Axis::X1, anchor};
}

std::vector<DistanceSample> power_law(double c, double t_k, double (*mod)(double)) {
  std::vector<DistanceSample> s;
  for (int i = 1; i <= 90; ++i) {
    const double t = t_k + 0.01 * i;
    s.push_back({t, c * std::sqrt(t - t_k) * mod(t)});
  }
  return s;
}

struct Collision {
  SymmetricState state;
  SolverConfig cfg;
};

Collision collide(NetworkType type, std::optional<Point2> anchor = std::nullopt) {
  const auto net = build_preset(type, 1.0, anchor);
  auto cfg = SolverConfig::for_network(net, 200);
  auto r = run_until_event(initial_state(net, cfg), cfg);
  EXPECT_EQ(r.event, EventKind::Type0);
  return {r.state, cfg};
}

}  // namespace

TEST(EventLog, EnforcesOrderingAndTermination) {
  EventLog log;
  log.append({0.1, EventKind::Type0, NetworkType::Theta, NetworkType::Eyeglasses});
  EXPECT_THROW(log.append({0.1, EventKind::Blowup, NetworkType::Eyeglasses, std::nullopt}), ContractError);
  EXPECT_THROW(log.append({0.2, EventKind::Type0, NetworkType::Eyeglasses, std::nullopt}), ContractError);
  log.append({0.3, EventKind::Blowup, NetworkType::Eyeglasses, std::nullopt});
  EXPECT_TRUE(log.finished());
  EXPECT_EQ(*log.terminal_time(), 0.3);
  EXPECT_EQ(log.type0_count(), 1u);
  EXPECT_THROW(log.append({0.4, EventKind::Type0, NetworkType::Theta, NetworkType::Eyeglasses}), ContractError);
}

TEST(TransitionType, InvolutionOnThetaAndEyeglasses) {
  EXPECT_EQ(transition_type(NetworkType::Theta), NetworkType::Eyeglasses);
  EXPECT_EQ(transition_type(NetworkType::Eyeglasses), NetworkType::Theta);
  EXPECT_EQ(transition_type(NetworkType::Tree), NetworkType::Tree);
  EXPECT_THROW(transition_type(NetworkType::Lens), ContractError);
}

TEST(ExpanderAge, UnitExpanderReachesDelta0) {
  const double b = expander().junction_height;
  EXPECT_NEAR(std::sqrt(expander_age(0.01)) * b, 0.01, 1e-15);
}

TEST(StandardTransition, ThetaBecomesEyeglasses) {
  const auto [state, cfg] = collide(NetworkType::Theta);
  const auto next = standard_transition(state, cfg);
  EXPECT_EQ(next.net.type, NetworkType::Eyeglasses);
  EXPECT_EQ(next.net.junction_axis, other(state.net.junction_axis));
  EXPECT_EQ(next.net.defining.size(), state.net.defining.size());
  EXPECT_NEAR(next.net.junction_distance(), cfg.delta0(), 1e-3 * cfg.delta0());
  EXPECT_TRUE(check_invariants(next.net, {1e-9, 1e-2, 0.0}).empty());
  EXPECT_NEAR(next.t, estimate_singular_time(state) + expander_age(cfg.delta0()), 1e-15);
  EXPECT_GT(next.t, state.t);
  const double h = hausdorff_distance(reconstruct_full(state.net).segments(),
                                      reconstruct_full(next.net).segments());
  EXPECT_LE(h, 2.0 * cfg.delta0());
}

TEST(StandardTransition, TreeStaysTree) {
  const auto [state, cfg] = collide(NetworkType::Tree, Point2{0.6, 1.4});
  const auto next = standard_transition(state, cfg);
  EXPECT_EQ(next.net.type, NetworkType::Tree);
  EXPECT_EQ(next.net.junction_axis, Axis::X2);
  EXPECT_EQ(next.net.defining.back(), state.net.defining.back());
  EXPECT_TRUE(check_invariants(next.net, {1e-9, 1e-2, 0.0}).empty());
}

TEST(StandardTransition, RejectsStatesThatHaveNotCollided) {
  const auto net = build_preset(NetworkType::Theta);
  const auto cfg = SolverConfig::for_network(net);
  EXPECT_THROW(standard_transition(initial_state(net, cfg), cfg), ContractError);
  const auto lens = build_preset(NetworkType::Lens);
  EXPECT_THROW(standard_transition(initial_state(lens, cfg), cfg), ContractError);
}

TEST(ExpanderFit, RecoversExactPowerLaw) {
  const auto s = power_law(0.3, 1.0, [](double) { return 1.0; });
  const auto f = fit_expander_bound(s, 1.0);
  EXPECT_NEAR(f.exponent, 0.5, 1e-12);
  EXPECT_NEAR(f.c, 0.3, 1e-12);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_TRUE(f.passes());
  EXPECT_DOUBLE_EQ(f.window_begin, s.front().t);
}

TEST(ExpanderFit, PerturbedLawStaysInBand) {
  const auto f = fit_expander_bound(power_law(0.3, 0.0, [](double t) { return 1.0 + 0.01 * std::sin(50.0 * t); }), 0.0);
  EXPECT_GE(f.exponent, 0.45);
  EXPECT_LE(f.exponent, 0.55);
}

TEST(ExpanderFit, LinearGrowthFails) {
  std::vector<DistanceSample> s;
  for (int i = 1; i <= 40; ++i) s.push_back({0.01 * i, 0.01 * i});
  const auto f = fit_expander_bound(s, 0.0);
  EXPECT_NEAR(f.exponent, 1.0, 1e-12);
  EXPECT_FALSE(f.passes());
}

TEST(ExpanderFit, RejectsBadSeries) {
  auto s = power_law(0.3, 0.0, [](double) { return 1.0; });
  EXPECT_THROW(fit_expander_bound(std::span(s).first(10), 0.0), ContractError);
  EXPECT_THROW(fit_expander_bound(s, 0.5), ContractError);
  s[40].d = 0.0;
  EXPECT_THROW(fit_expander_bound(s, 0.0), ContractError);
}

// Steiner junctions of the symmetric anchor rectangles, from the 2π/3
// condition: the edge to (p1, p2) leaves (a, 0) along the 60° ray.
TEST(Steiner, ClosedFormJunctions) {
  EXPECT_NEAR(steiner_junction({1.0, 1.0})->x1, 1.0 - 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(steiner_junction({1.2, 1.0})->x1, 0.622650, 1e-6);
  EXPECT_NEAR(steiner_junction({1.0, std::tan(pi / 6.0)})->x1, 2.0 / 3.0, 1e-15);
  const auto up = steiner_junction({0.6, 1.4});
  EXPECT_EQ(up->x1, 0.0);
  EXPECT_NEAR(up->x2, 1.0536, 1e-4);
}

TEST(ClassifyLimit, StraightSteinerEdge) {
  const Point2 anchor{1.0, std::tan(pi / 6.0)};
  const auto net = straight_tree(*steiner_junction(anchor), anchor);
  const auto cfg = SolverConfig::for_network(net);
  EXPECT_EQ(classify_limit({net, 1.0, 0}, cfg), LimitClass::SteinerTree);
}

TEST(ClassifyLimit, StraightThroughOriginIsCross) {
  const Point2 anchor{0.5, 0.5 * std::sqrt(3.0)};
  const auto net = straight_tree({0.0, 0.0}, anchor);
  const auto cfg = SolverConfig::for_network(net);
  EXPECT_EQ(classify_limit({net, 1.0, 0}, cfg), LimitClass::StandardCross);
}

TEST(ClassifyLimit, CurvedIsUndecidedAndLensRejected) {
  const auto tree = build_preset(NetworkType::Tree);
  const auto cfg = SolverConfig::for_network(tree);
  EXPECT_EQ(classify_limit({tree, 0.0, 0}, cfg), LimitClass::Undecided);
  EXPECT_THROW(classify_limit({build_preset(NetworkType::Lens), 0.0, 0}, cfg), ContractError);
}
