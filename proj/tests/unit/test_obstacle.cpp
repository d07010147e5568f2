#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fbp/error.hpp"
#include "fbp/obstacle.hpp"

using namespace fbp;

TEST(Obstacle, PlateauValue) {
  const auto ob = ObstacleSpec::parabolic_skirt(0.25);
  EXPECT_EQ(ob.phi({0.0, 0.0}), 1.0);
  EXPECT_EQ(ob.phi({0.6, 0.8}), 1.0);
}

TEST(Obstacle, SkirtEndpointAndHandValue) {
  EXPECT_NEAR(ObstacleSpec::parabolic_skirt(0.25).phi({1.25, 0.0}), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(ObstacleSpec::parabolic_skirt(0.5).phi({1.25, 0.0}), 0.75);
  EXPECT_DOUBLE_EQ(ObstacleSpec::parabolic_skirt(0.5).phi({0.0, -1.25}), 0.75);
  EXPECT_EQ(ObstacleSpec::parabolic_skirt(0.5).phi({3.0, 0.0}), 0.0);
}

TEST(Obstacle, SupportPredicates) {
  const auto ob = ObstacleSpec::parabolic_skirt(0.3);
  EXPECT_DOUBLE_EQ(ob.support_radius(), 1.3);
  EXPECT_FALSE(ob.in_coincidence_candidate({2.0, 0.0}));
  EXPECT_TRUE(ob.in_coincidence_candidate({1.1, 0.0}));
  EXPECT_TRUE(ob.in_coincidence_candidate({0.0, -1.1}));
}

TEST(Obstacle, ShiftedCenter) {
  const auto ob = ObstacleSpec::parabolic_skirt(0.25, {0.5, 0.0});
  EXPECT_EQ(ob.phi({0.5, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(ob.distance_from_center({1.5, 0.0}), 1.0);
}

TEST(Obstacle, ConstantProfile) {
  const auto ob = ObstacleSpec::constant(2.0);
  EXPECT_EQ(ob.phi({5.0, -3.0}), 2.0);
  EXPECT_TRUE(std::isinf(ob.support_radius()));
  EXPECT_EQ(ob.max_value(), 2.0);
}

TEST(ObstacleProperty, RangeMonotoneConcave) {
  for (double rho0 : {0.1, 0.25, 0.4, 1.0}) {
    const auto ob = ObstacleSpec::parabolic_skirt(rho0);
    const double h = rho0 / 400.0;
    double prev = ob.phi_radial(0.0);
    for (double r = h; r < 2.0 + rho0; r += h) {
      const double v = ob.phi_radial(r);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      EXPECT_LE(v - prev, 1e-15);
      prev = v;
      if (r > 1.0 + h && r + h < 1.0 + rho0) {
        EXPECT_LT(ob.phi_radial(r + h) - 2.0 * v + ob.phi_radial(r - h), 0.0) << "r=" << r;
      }
    }
  }
}

TEST(ObstacleProperty, C1GlueAtUnitRadius) {
  const auto ob = ObstacleSpec::parabolic_skirt(0.25);
  const double h = 1e-7;
  EXPECT_NEAR((ob.phi_radial(1.0 + h) - ob.phi_radial(1.0)) / h, 0.0, 1e-5);
}

TEST(ObstacleProperty, SampleMatchesPhi) {
  const Grid g(GridSpec{.plane_dim = 2, .half_width = 2.0, .depth = 1.0, .nx = 21, .ny = 3});
  const auto ob = ObstacleSpec::parabolic_skirt(0.25);
  const auto s = ob.sample(g);
  for (std::size_t p = 0; p < g.plane_size(); ++p) EXPECT_EQ(s[p], ob.phi(g.plane_point(p)));
}

TEST(CustomRadial, AcceptsValidTable) {
  std::vector<std::pair<double, double>> t;
  const double rho0 = 0.3;
  for (int k = 0; k <= 100; ++k) {
    const double r = (1.0 + rho0) * k / 100.0;
    const double s = (r - 1.0) / rho0;
    t.emplace_back(r, r <= 1.0 ? 1.0 : std::max(0.0, 1.0 - s * s));
  }
  const auto ob = ObstacleSpec::custom_radial(t, rho0);
  EXPECT_EQ(ob.profile(), ObstacleProfile::CustomRadial);
  EXPECT_EQ(ob.phi({0.5, 0.0}), 1.0);
  EXPECT_NEAR(ob.phi({1.15, 0.0}), 0.75, 5e-3);
  EXPECT_EQ(ob.phi({1.5, 0.0}), 0.0);
}

TEST(CustomRadial, RejectsViolations) {
  auto code = [](std::vector<std::pair<double, double>> t) {
    try {
      (void)ObstacleSpec::custom_radial(std::move(t), 0.5);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  // plateau not 1
  EXPECT_EQ(code({{0.0, 0.9}, {1.0, 0.9}, {1.2, 0.5}, {1.5, 0.0}}), ErrorCode::InvalidObstacle);
  // increasing
  EXPECT_EQ(code({{0.0, 1.0}, {1.0, 1.0}, {1.2, 0.5}, {1.3, 0.6}, {1.5, 0.0}}), ErrorCode::InvalidObstacle);
  // positive beyond 1 + rho0
  EXPECT_EQ(code({{0.0, 1.0}, {1.0, 1.0}, {1.2, 0.8}, {1.4, 0.5}, {1.6, 0.1}}), ErrorCode::InvalidObstacle);
  // convex skirt
  EXPECT_EQ(code({{0.0, 1.0}, {1.0, 1.0}, {1.1, 0.3}, {1.2, 0.1}, {1.3, 0.05}, {1.5, 0.0}}), ErrorCode::InvalidObstacle);
}
