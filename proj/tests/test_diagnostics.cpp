#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "netflow/diagnostics.hpp"
#include "netflow/presets.hpp"

using namespace netflow;
using std::numbers::pi;

namespace {

IntersectionSeries series(std::initializer_list<IntersectionSample> s) {
  IntersectionSeries out(pi / 4.0);
  for (const auto& x : s) out.append(x);
  return out;
}

EventLog collision_at(double t) {
  EventLog log;
  log.append({t, EventKind::Type0, NetworkType::Theta, NetworkType::Eyeglasses});
  return log;
}

}  // namespace

TEST(Series, RejectsUnorderedOrNegative) {
  IntersectionSeries s(pi / 4.0);
  s.append({0.0, 1, false});
  EXPECT_THROW(s.append({0.0, 1, false}), ContractError);
  EXPECT_THROW(s.append({1.0, -1, false}), ContractError);
}

TEST(Certify, DropAtCollisionPasses) {
  const auto s = series({{0, 3, false}, {1, 3, false}, {2, 2, false}, {3, 2, false}});
  const auto c = certify_monotone(s, collision_at(2.0));
  EXPECT_TRUE(c.pass);
  EXPECT_EQ(c.first_i, 3);
  EXPECT_EQ(c.last_i, 2);
}

TEST(Certify, IncreaseInRegularIntervalFails) {
  const auto s = series({{0, 2, false}, {1, 3, false}, {2, 3, false}});
  const auto c = certify_monotone(s, EventLog{});
  ASSERT_FALSE(c.pass);
  ASSERT_EQ(c.violations.size(), 1u);
  EXPECT_EQ(c.violations[0].clause, 'a');
  EXPECT_EQ(c.violations[0].t, 1.0);
}

TEST(Certify, ConstantAcrossCollisionFails) {
  const auto s = series({{0, 2, false}, {1, 2, false}, {2, 2, false}, {3, 2, false}});
  const auto c = certify_monotone(s, collision_at(1.5));
  ASSERT_FALSE(c.pass);
  EXPECT_EQ(c.violations[0].clause, 'b');
}

TEST(Certify, DropNeedsNearbyTangency) {
  const auto bare = series({{0, 2, false}, {1, 2, false}, {2, 0, false}, {3, 0, false}, {4, 0, false}, {5, 0, false}});
  const auto c = certify_monotone(bare, EventLog{});
  ASSERT_FALSE(c.pass);
  EXPECT_EQ(c.violations[0].clause, 'c');

  const auto flagged = series({{0, 2, false}, {1, 2, true}, {2, 0, false}, {3, 0, false}});
  EXPECT_TRUE(certify_monotone(flagged, EventLog{}).pass);
  const auto late = series({{0, 2, false}, {1, 2, false}, {2, 0, false}, {3, 0, false}, {4, 0, true}});
  EXPECT_TRUE(certify_monotone(late, EventLog{}).pass);
}

TEST(Certify, EventsMustLieInsideTheSeries) {
  const auto s = series({{0, 1, false}, {1, 1, false}});
  EXPECT_THROW(certify_monotone(s, collision_at(2.0)), ContractError);
  EXPECT_THROW(certify_monotone(IntersectionSeries(pi / 4.0), EventLog{}), ContractError);
}

TEST(SampleI, ThetaPresetOnce) {
  const auto net = build_preset(NetworkType::Theta);
  const auto c = sample_i({net, 0.0, 0}, TestLine{pi / 4.0});
  EXPECT_EQ(c.count, 1);
  EXPECT_FALSE(c.tangency);
}

TEST(SampleI, AnchorOnLineIsRejected) {
  const auto net = build_preset(NetworkType::Tree, 1.0, Point2{1.0, 1.0});
  EXPECT_THROW(sample_i({net, 0.0, 0}, TestLine{pi / 4.0}), ContractError);
  EXPECT_NO_THROW(sample_i({net, 0.0, 0}, TestLine{pi / 3.5}));
}

TEST(MiddleRate, ExactOnLinearData) {
  std::vector<TimeValue> v;
  for (int k = 0; k < 50; ++k) v.push_back({0.1 * k, 2.0 - 3.0 * 0.1 * k + (k < 10 || k >= 40 ? 5.0 : 0.0)});
  EXPECT_NEAR(*middle_rate(v), -3.0, 1e-12);
  EXPECT_FALSE(middle_rate(std::span(v).first(2)).has_value());
}

TEST(RunReport, AggregatesTheRun) {
  EventLog log = collision_at(1.5);
  log.append({3.0, EventKind::Blowup, NetworkType::Eyeglasses, std::nullopt});
  const std::vector<IntersectionSeries> s{series({{0, 1, false}, {1, 1, false}, {2, 0, false}, {3, 0, false}})};
  AreaPhase phase{NetworkType::Theta, 0, {}};
  for (int k = 0; k < 20; ++k) phase.samples.push_back({0.05 * k, 1.0 - gauss_bonnet_rate(NetworkType::Theta) * 0.05 * k});
  const auto r = run_report(NetworkType::Theta, log, s, std::vector<AreaPhase>{phase}, {});
  EXPECT_EQ(r.type0_count, 1u);
  EXPECT_EQ(*r.terminal, EventKind::Blowup);
  EXPECT_EQ(*r.terminal_type, NetworkType::Eyeglasses);
  EXPECT_EQ(r.flow_time, 3.0);
  ASSERT_EQ(r.area_rates.size(), 1u);
  EXPECT_LT(r.area_rates[0].relative_error(), 1e-12);
  EXPECT_TRUE(r.monotone());
  EXPECT_EQ(expected_terminal(NetworkType::Tree), EventKind::Converged);
  EXPECT_EQ(expected_terminal(NetworkType::Lens), EventKind::Blowup);
}
