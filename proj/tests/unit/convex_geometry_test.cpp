#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "msl/convex_geometry.hpp"
#include "msl/random.hpp"
#include "support/oracles.hpp"

namespace msl {
namespace {

TEST(UnitBallVolume, MatchesRecursion) {
  EXPECT_DOUBLE_EQ(unit_ball_volume(1), 2.0);
  EXPECT_NEAR(unit_ball_volume(2), kPi, 1e-14);
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(unit_ball_volume(k), oracle::ball_volume(k), 1e-12) << k;
}

TEST(SharpConstant, KnownValues) {
  EXPECT_NEAR(sharp_constant(2), kPi / 2.0, 1e-12);
  EXPECT_NEAR(sharp_constant(3), 2.0, 1e-12);
  EXPECT_NEAR(sharp_constant(4), 3.0 * kPi / 4.0, 1e-12);
  EXPECT_THROW(sharp_constant(1), ValidationError);
}

TEST(UnitVector, RejectsNonUnit) {
  EXPECT_THROW(UnitVector({1.0, 1.0}), ValidationError);
  EXPECT_THROW(UnitVector::normalized({0.0, 0.0}), ValidationError);
  EXPECT_NO_THROW(UnitVector({0.6, 0.8}));
}

TEST(SupportFunction, BuiltIns) {
  EXPECT_DOUBLE_EQ(support_function(ConvexBody::ball(3), UnitVector::axis(3, 1)), 1.0);
  EXPECT_NEAR(support_function(ConvexBody::cube(2), UnitVector::normalized({1.0, 1.0})), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(support_function(ConvexBody::lp_ball_2d(1.0), UnitVector({0.6, 0.8})), 0.8, 1e-15);
  for (double p : {1.5, 3.0, 8.0}) {
    const UnitVector t({0.6, 0.8});
    EXPECT_NEAR(support_function(ConvexBody::lp_ball_2d(p), t), oracle::h_lp(0.6, 0.8, p), 1e-12) << p;
  }
}

TEST(Gauge, BuiltIns) {
  EXPECT_DOUBLE_EQ(gauge(ConvexBody::ball(2), Point{0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(gauge(ConvexBody::cube(4), Point{1.0, 1.0, 1.0, 1.0}), 1.0);
  EXPECT_DOUBLE_EQ(gauge(ConvexBody::ball(2, 2.0), Point{3.0, 4.0}), 2.5);
  EXPECT_THROW(gauge(ConvexBody::ball(2), Point{1.0, 2.0, 3.0}), DimensionMismatch);
}

TEST(Gauge, OracleBodyAgreesWithClosedForm) {
  const auto disk = ConvexBody::from_oracle(2, [](const UnitVector&) { return 2.0; }, {.smooth = true});
  EXPECT_NEAR(gauge(disk, Point{3.0, 4.0}), 2.5, 1e-4);
}

TEST(MeanWidth, BallIsTwiceRadius) {
  for (int d : {2, 3})
    for (double R : {0.5, 1.0, 3.0})
      EXPECT_NEAR(mean_width(ConvexBody::ball(d, R), SphereQuadrature::standard(d)).value, 2.0 * R, 1e-6);
}

TEST(MeanWidth, CubeMatchesDirectIntegral) {
  // W of [-R, R]^d is 4 R omega_{d-1} / omega_d; for R = 1/2 that is 4/pi (d = 2), 3/2 (d = 3).
  const double w2 = oracle::mean_width_2d([](double c, double s) { return oracle::h_cube({c, s}, 1.0); });
  EXPECT_NEAR(w2, 8.0 / kPi, 1e-8);
  EXPECT_NEAR(mean_width(ConvexBody::cube(2, 1.0), SphereQuadrature::standard(2)).value, w2, 1e-6);
  EXPECT_NEAR(mean_width(ConvexBody::cube(2, 0.5), SphereQuadrature::standard(2)).value, 4.0 / kPi, 1e-6);
  EXPECT_NEAR(mean_width(ConvexBody::cube(3, 0.5), SphereQuadrature::standard(3)).value, 1.5, 1e-4);
}

TEST(MeanWidth, LpBallsAgainstMidpointRule) {
  for (double p : {1.0, 1.5, 3.0, std::numeric_limits<double>::infinity()}) {
    const double ref = oracle::mean_width_2d([p](double c, double s) { return oracle::h_lp(c, s, p); });
    EXPECT_NEAR(mean_width(ConvexBody::lp_ball_2d(p), SphereQuadrature::standard(2)).value, ref, 1e-6) << p;
  }
}

TEST(BoundaryPoint, BallAndConsistency) {
  const auto b = boundary_point(ConvexBody::ball(2, 3.0), UnitVector({0.0, 1.0}));
  EXPECT_NEAR(b[0], 0.0, 1e-15);
  EXPECT_NEAR(b[1], 3.0, 1e-15);
  const auto q = boundary_point(ConvexBody::lp_ball_2d(2.0), UnitVector({0.6, 0.8}));
  EXPECT_NEAR(q[0], 0.6, 1e-9);
  EXPECT_NEAR(q[1], 0.8, 1e-9);
}

TEST(BoundaryPoint, LiesOnBoundaryWithMatchingSupport) {
  const auto K = ConvexBody::lp_ball_2d(4.0);
  for (double phi : {0.1, 0.7, 2.0, 4.0}) {
    const auto t = UnitVector::from_angle(phi);
    const auto x = boundary_point(K, t);
    EXPECT_NEAR(gauge(K, x), 1.0, 1e-8);
    EXPECT_NEAR(dot(x, t.span()), support_function(K, t), 1e-8);
  }
}

TEST(BoundaryPoint, RejectsNonStrictlyConvex) {
  EXPECT_THROW(boundary_point(ConvexBody::cube(2), UnitVector::axis(2, 0)), NotStrictlyConvex);
  EXPECT_THROW(sample_boundary(ConvexBody::lp_ball_2d(1.0), 10, 1), NotStrictlyConvex);
}

TEST(SampleBoundary, BallSymmetryAndSphereIdentity) {
  const std::size_t N = 200000;
  const auto s2 = sample_boundary(ConvexBody::ball(2), N, 11);
  double mx = 0.0, my = 0.0;
  for (const auto& s : s2) {
    mx += s.normal[0];
    my += s.normal[1];
  }
  EXPECT_LT(std::abs(mx / N), 3.0 / std::sqrt(double(N)));
  EXPECT_LT(std::abs(my / N), 3.0 / std::sqrt(double(N)));

  const auto s3 = sample_boundary(ConvexBody::ball(3), N, 12);
  const Point v{0.48, 0.6, 0.64};
  double m = 0.0;
  for (const auto& s : s3) m += std::abs(dot(s.normal.span(), v));
  EXPECT_NEAR(m / N, 0.5, 4.0 * 0.29 / std::sqrt(double(N)));
}

TEST(SampleBoundary, Deterministic) {
  const auto K = ConvexBody::lp_ball_2d(3.0);
  const auto a = sample_boundary(K, 5000, 99);
  const auto b = sample_boundary(K, 5000, 99);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].point, b[i].point);
    EXPECT_EQ(a[i].normal.coords(), b[i].normal.coords());
  }
}

TEST(SampleBoundary, PointsAreUniformInArcLength) {
  // Fraction of l^4 boundary samples in the first quadrant sector below the
  // diagonal equals 1/8 by symmetry.
  const auto K = ConvexBody::lp_ball_2d(4.0);
  const std::size_t N = 80000;
  const auto s = sample_boundary(K, N, 5);
  std::size_t hits = 0;
  for (const auto& x : s)
    if (x.point[0] > 0 && x.point[1] > 0 && x.point[1] < x.point[0]) ++hits;
  EXPECT_NEAR(double(hits) / N, 0.125, 4.0 * std::sqrt(0.125 * 0.875 / N));
}

TEST(Perimeter, AgainstPolylineAndCauchy) {
  EXPECT_NEAR(perimeter_2d(ConvexBody::ball(2)).perimeter, 2.0 * kPi, 1e-6);
  EXPECT_NEAR(perimeter_2d(ConvexBody::lp_ball_2d(1.0)).perimeter, 4.0 * std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(perimeter_2d(ConvexBody::cube(2)).perimeter, 8.0, 1e-6);
  for (double p : {1.5, 3.0}) {
    const auto r = perimeter_2d(ConvexBody::lp_ball_2d(p));
    EXPECT_NEAR(r.perimeter, oracle::lp_perimeter(p), 1e-5) << p;
    EXPECT_LT(r.discrepancy, 1e-5);
  }
}

TEST(ConvexBody, QuarterTurnFlag) {
  EXPECT_TRUE(ConvexBody::lp_ball_2d(3.0).quarter_turn_symmetric());
  EXPECT_TRUE(ConvexBody::ball(2).quarter_turn_symmetric());
  std::vector<double> h(64);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double phi = 2.0 * kPi * i / h.size();
    h[i] = std::hypot(2.0 * std::cos(phi), std::sin(phi));  // ellipse with axes 2 and 1
  }
  const auto ellipse = ConvexBody::from_angle_grid(h);
  EXPECT_FALSE(ellipse.quarter_turn_symmetric());
}

TEST(ConvexBody, ValidationErrors) {
  EXPECT_THROW(ConvexBody::ball(2, -1.0), ValidationError);
  EXPECT_THROW(ConvexBody::lp_ball_2d(0.5), ValidationError);
  std::vector<double> asym(16, 1.0);
  asym[3] = 2.0;
  EXPECT_THROW(ConvexBody::from_angle_grid(asym), BodyDefinitionError);
}

}  // namespace
}  // namespace msl
