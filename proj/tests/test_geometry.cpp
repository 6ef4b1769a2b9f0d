#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "netflow/geometry.hpp"
#include "netflow/presets.hpp"
#include "netflow/resample.hpp"

using namespace netflow;
using std::numbers::pi;

namespace {

DiscreteCurve arc_curve(double r, int n) {
  std::vector<Point2> p;
  for (int i = 0; i <= n; ++i) {
    const double a = 0.5 * pi * i / n;
    p.push_back({r * std::cos(a), r * std::sin(a)});
  }
  return DiscreteCurve(p, false);
}

// Sign changes of a polyline against the line through the origin at `angle`.
int crossings(const std::vector<Point2>& pts, double angle) {
  const Point2 d{std::cos(angle), std::sin(angle)};
  int count = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = cross(d, pts[i]);
    const double b = cross(d, pts[i + 1]);
    if (a * b < 0.0) ++count;
  }
  return count;
}

}  // namespace

TEST(DiscreteCurve, RejectsDegenerateInput) {
  EXPECT_THROW(DiscreteCurve({{0, 0}, {1, 0}}, false), GeometryError);
  EXPECT_THROW(DiscreteCurve({{0, 0}, {0, 0}, {1, 0}}, false), GeometryError);
  EXPECT_THROW(DiscreteCurve({{0, 0}, {NAN, 0}, {1, 0}}, false), GeometryError);
}

TEST(DiscreteCurve, QuarterCircleCurvatureAndTurning) {
  const auto c = arc_curve(2.0, 200);
  const auto f = derived_quantities(c);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) EXPECT_NEAR(std::abs(f[i].curvature), 0.5, 1e-4);
  EXPECT_NEAR(std::abs(turning_integral(c)), 0.5 * pi, 1e-3);
  EXPECT_NEAR(c.length(), pi, 1e-4);
}

TEST(DiscreteCurve, SimplicityDetectsSelfCrossing) {
  EXPECT_TRUE(is_simple(arc_curve(1.0, 50), 0.0));
  const DiscreteCurve bow({{0, 0}, {1, 1}, {1, 0}, {0, 1}}, false);
  EXPECT_FALSE(is_simple(bow, 0.0));
}

TEST(TestLine, AdmissibleRangeIsOpen) {
  EXPECT_THROW(TestLine{pi / 6.0}, ContractError);
  EXPECT_THROW(TestLine{pi / 3.0}, ContractError);
  EXPECT_NO_THROW(TestLine{pi / 4.0});
  EXPECT_NO_THROW(TestLine{pi / 3.5});
}

TEST(Intersections, CurveAboveLineHasNone) {
  const DiscreteCurve c({{0.0, 1.0}, {0.1, 2.0}, {0.2, 3.0}}, false);
  EXPECT_EQ(count_line_intersections(c, TestLine{pi / 4.0}).count, 0);
}

TEST(Intersections, ZigzagCountsEveryCrossing) {
  std::vector<Point2> pts;
  for (int k = 0; k < 8; ++k) pts.push_back({1.0 + k, 1.0 + k + (k % 2 ? 0.5 : -0.5)});
  const auto r = count_line_intersections(pts, TestLine{pi / 4.0}, 1e-12, 1e-3);
  EXPECT_EQ(r.count, 7);
  EXPECT_FALSE(r.tangency);
}

TEST(Intersections, NearbyCrossingPairFlagsTangency) {
  const std::vector<Point2> pts{{1.0, 1.1}, {1.5, 1.49}, {2.0, 2.1}};
  const auto r = count_line_intersections(pts, TestLine{pi / 4.0}, 1e-12, 2.0);
  EXPECT_EQ(r.count, 2);
  EXPECT_TRUE(r.tangency);
}

TEST(Intersections, VertexOnLineFlagsTangency) {
  const std::vector<Point2> pts{{1.0, 1.5}, {1.0, 1.0}, {1.0, 1.5}};
  const auto r = count_line_intersections(pts, TestLine{pi / 4.0}, 1e-12);
  EXPECT_EQ(r.count, 0);
  EXPECT_TRUE(r.tangency);
}

TEST(Presets, AllSatisfyInvariants) {
  for (auto t : {NetworkType::Tree, NetworkType::Lens, NetworkType::Theta, NetworkType::Eyeglasses}) {
    for (double s : {0.5, 1.0, 3.0}) {
      const auto net = build_preset(t, s);
      EXPECT_TRUE(check_invariants(net).empty()) << to_string(t) << " scale " << s;
      EXPECT_TRUE(is_simple(net.defining, 0.0));
    }
  }
}

TEST(Presets, BoundaryRegimes) {
  const auto theta = build_preset(NetworkType::Theta);
  EXPECT_NEAR(off(theta.junction_axis, theta.defining.front()), 0.0, 1e-12);
  EXPECT_NEAR(along(theta.junction_axis, theta.defining.back()), 0.0, 1e-12);

  const auto eye = build_preset(NetworkType::Eyeglasses);
  EXPECT_NEAR(off(eye.junction_axis, eye.defining.front()), 0.0, 1e-12);
  EXPECT_NEAR(off(eye.junction_axis, eye.defining.back()), 0.0, 1e-12);

  const auto tree = build_preset(NetworkType::Tree, 1.0, Point2{2.0, 1.73});
  ASSERT_TRUE(tree.anchor.has_value());
  EXPECT_EQ(tree.defining.back().x1, 2.0);
  EXPECT_EQ(tree.defining.back().x2, 1.73);
}

TEST(Presets, ThetaMeetsQuarterLineOnce) {
  const auto theta = build_preset(NetworkType::Theta);
  EXPECT_EQ(count_line_intersections(theta.defining, TestLine{pi / 4.0}).count, 1);
  EXPECT_EQ(crossings(theta.defining.points(), pi / 4.0), 1);
}

TEST(Invariants, DetectsBrokenJunctionAngle) {
  const DiscreteCurve c({{0.5, 0.0}, {0.6, 0.4}, {0.6, 1.0}}, false);
  const SymmetricNetwork bad{c, NetworkType::Theta, Axis::X1, std::nullopt};
  EXPECT_FALSE(check_invariants(bad).empty());
}

// The count on the defining curve is a quarter of the crossings of the full
// network with the line pair {ℓ, reflection of ℓ across the x1-axis}.
TEST(Reflection, QuarterOfFullNetworkCount) {
  for (auto t : {NetworkType::Tree, NetworkType::Theta, NetworkType::Eyeglasses, NetworkType::Lens}) {
    for (double angle : {pi / 4.0, pi / 3.5}) {
      const auto net = build_preset(t, 1.0, t == NetworkType::Tree ? std::optional<Point2>{{1.2, 0.3}} : std::nullopt);
      const int i = count_line_intersections(net.defining, TestLine{angle}).count;
      int total = 0;
      for (const auto& arc : reconstruct_full(net).arcs) {
        total += crossings(arc.points(), angle) + crossings(arc.points(), -angle);
      }
      EXPECT_EQ(total, 4 * i) << to_string(t);
    }
  }
}

TEST(Areas, QuarterDiskSectors) {
  const auto c = arc_curve(1.0, 400);
  const SymmetricNetwork lens{c, NetworkType::Lens, Axis::X1, std::nullopt};
  EXPECT_NEAR(enclosed_area(lens)[0], pi, 1e-4);
  EXPECT_THROW(enclosed_area(build_preset(NetworkType::Tree)), ContractError);
}

TEST(Areas, GaussBonnetRates) {
  EXPECT_DOUBLE_EQ(gauss_bonnet_rate(NetworkType::Lens), 4.0 * pi / 3.0);
  EXPECT_DOUBLE_EQ(gauss_bonnet_rate(NetworkType::Theta), 4.0 * pi / 3.0);
  EXPECT_DOUBLE_EQ(gauss_bonnet_rate(NetworkType::Eyeglasses), 5.0 * pi / 3.0);
}

TEST(Hausdorff, ShiftedSegment) {
  const std::vector<std::pair<Point2, Point2>> a{{{0, 0}, {1, 0}}};
  const std::vector<std::pair<Point2, Point2>> b{{{0, 0.25}, {1, 0.25}}};
  EXPECT_NEAR(hausdorff_distance(a, b), 0.25, 1e-12);
}

TEST(Diameter, TwiceMaxRadius) {
  const auto c = arc_curve(1.5, 20);
  EXPECT_NEAR(network_diameter({c, NetworkType::Lens, Axis::X1, std::nullopt}), 3.0, 1e-12);
}

TEST(Resample, UniformKeepsEndpointsAndEqualizes) {
  const auto c = arc_curve(1.0, 150);
  const auto r = resample_uniform(c.points(), 101);
  ASSERT_EQ(r.size(), 101u);
  EXPECT_EQ(r.front().x1, c.front().x1);
  EXPECT_EQ(r.back().x2, c.back().x2);
  const DiscreteCurve rc(r, false);
  for (std::size_t i = 0; i < rc.segment_count(); ++i) {
    EXPECT_NEAR(rc.segment_length(i), rc.length() / 100.0, 1e-4);
  }
  for (const auto& p : r) EXPECT_NEAR(norm(p), 1.0, 1e-5);
}

TEST(Resample, GradedStationsRefineNearTheStart) {
  const auto s = graded_stations(1.0, 100, 0.01, 0.1);
  ASSERT_EQ(s.size(), 100u);
  EXPECT_DOUBLE_EQ(s.front(), 0.0);
  EXPECT_NEAR(s.back(), 1.0, 1e-14);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    EXPECT_GT(s[i + 1], s[i]);
    EXPECT_LE(s[i + 1] - s[i], 0.1 * (0.01 + s[i + 1]) + 1e-3 + 1e-12);
  }
  EXPECT_LT(s[1], 0.002);
}

TEST(Resample, GradingInactiveFarFromOrigin) {
  const auto s = graded_stations(1.0, 11, 10.0, 0.1);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(s[i], 0.1 * i, 1e-12);
}
