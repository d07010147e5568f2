#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fbp/error.hpp"
#include "fbp/grid.hpp"

using namespace fbp;

namespace {

Grid make(int n_dim, double R, double L, int nx, int ny, Geometry geom = Geometry::Cartesian) {
  return build_grid(GridSpec{.plane_dim = n_dim, .half_width = R, .depth = L, .nx = nx, .ny = ny, .geometry = geom});
}

ErrorCode code_of(const GridSpec& s) {
  try {
    (void)build_grid(s);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST(Grid, SpacingAndOrigin) {
  const Grid g = make(1, 4.0, 4.0, 9, 5);
  EXPECT_DOUBLE_EQ(g.hx(), 1.0);
  EXPECT_DOUBLE_EQ(g.hy(), 1.0);
  EXPECT_EQ(g.coord(4), 0.0);
  EXPECT_EQ(g.y(4), 0.0);
  EXPECT_EQ(g.plane_point(4)[0], 0.0);
}

TEST(Grid, EvenNodeCountRejected) {
  EXPECT_EQ(code_of(GridSpec{.plane_dim = 1, .half_width = 4.0, .nx = 8}), ErrorCode::EvenNodeCount);
}

TEST(Grid, NonpositiveSizesRejected) {
  EXPECT_EQ(code_of(GridSpec{.plane_dim = 1, .half_width = -1.0, .nx = 9, .ny = 5}), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of(GridSpec{.plane_dim = 1, .depth = 0.0, .nx = 9, .ny = 5}), ErrorCode::InvalidGrid);
  EXPECT_EQ(code_of(GridSpec{.plane_dim = 3, .nx = 9, .ny = 5}), ErrorCode::InvalidGrid);
}

TEST(Grid, NodeCountTwoPlaneAxes) {
  const Grid g = make(2, 3.0, 2.0, 7, 5);
  EXPECT_EQ(g.size(), 245u);
  EXPECT_EQ(g.plane_size(), 49u);
}

TEST(Grid, TopLayerIsExactlyZero) {
  const Grid g = make(1, 6.0, 4.0, 513, 257);
  EXPECT_EQ(g.y(g.top()), 0.0);
  EXPECT_EQ(g.y(0), -4.0);
  EXPECT_EQ(g.coord(0), -6.0);
  EXPECT_EQ(g.coord(512), 6.0);
}

TEST(Grid, IndexRoundTrip) {
  const Grid g = make(2, 3.0, 2.0, 7, 5);
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    const auto m = g.plane_multi(p);
    EXPECT_EQ(g.plane_index(m[0], m[1]), p);
    const PlanePoint x = g.plane_point(p);
    EXPECT_EQ(g.axis_index(x[0]), m[0]);
    EXPECT_EQ(g.axis_index(x[1]), m[1]);
  }
  for (int j = 0; j < g.ny(); ++j) EXPECT_EQ(g.depth_index(g.y(j)), j);
}

TEST(Grid, AxisymmetricStartsAtAxis) {
  const Grid g = make(2, 6.0, 4.0, 257, 129, Geometry::Axisymmetric);
  EXPECT_EQ(g.plane_axes(), 1);
  EXPECT_EQ(g.coord(0), 0.0);
  EXPECT_DOUBLE_EQ(g.hx(), 6.0 / 256.0);
  EXPECT_TRUE(g.on_lateral_face(256));
  EXPECT_FALSE(g.on_lateral_face(0));
}

TEST(PlaneTrace, ConstantField) {
  const Grid g = make(1, 4.0, 4.0, 9, 5);
  const PlaneField t = plane_trace(Field(g, 1.0));
  for (double v : t.values) EXPECT_EQ(v, 1.0);
}

TEST(PlaneTrace, DepthFieldVanishes) {
  const Grid g = make(2, 3.0, 2.0, 7, 5);
  const Field f = sample_field(g, [](const PlanePoint&, double y) { return y; });
  for (double v : plane_trace(f).values) EXPECT_EQ(v, 0.0);
}

TEST(PlaneTrace, FirstCoordinate) {
  const Grid g = make(2, 3.0, 2.0, 7, 5);
  const Field f = sample_field(g, [](const PlanePoint& x, double) { return x[0]; });
  const PlaneField t = plane_trace(f);
  for (std::size_t p = 0; p < g.plane_size(); ++p) EXPECT_EQ(t.values[p], g.plane_point(p)[0]);
}

TEST(PlaneTrace, ViewWritesThrough) {
  const Grid g = make(1, 4.0, 4.0, 9, 5);
  Field f(g, 0.0);
  f.plane_view()[3] = 7.0;
  EXPECT_EQ(f.at(3, g.top()), 7.0);
  EXPECT_EQ(plane_trace(f).values[3], 7.0);
}

TEST(Interpolate, LinearInDepth) {
  const double M = 1.5;
  const Grid g = make(1, 4.0, 4.0, 9, 17);
  const Field f = sample_field(g, [&](const PlanePoint&, double y) { return y + M; });
  EXPECT_DOUBLE_EQ(interpolate(f, {0.0, 0.0}, -M / 2.0), M / 2.0);
}

TEST(Interpolate, NodalValues) {
  const Grid g = make(2, 3.0, 2.0, 7, 5);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f(g);
  for (double& v : f.values()) v = U(rng);
  for (std::size_t p = 0; p < g.plane_size(); p += 5) {
    for (int j = 0; j < g.ny(); ++j) EXPECT_NEAR(interpolate(f, g.plane_point(p), g.y(j)), f.at(p, j), 1e-15);
  }
}

TEST(Interpolate, BilinearCellMidpoint) {
  const Grid g = make(1, 4.0, 4.0, 9, 5);
  const Field f = sample_field(g, [](const PlanePoint& x, double y) { return x[0] * y; });
  // cell [1,2] x [-2,-1]: midpoint (1.5, -1.5)
  EXPECT_DOUBLE_EQ(interpolate(f, {1.5, 0.0}, -1.5), 1.5 * -1.5);
}

TEST(Interpolate, ReproducesMultilinear) {
  const Grid g = make(2, 3.0, 2.0, 7, 5);
  auto poly = [](const PlanePoint& x, double y) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * y + x[0] * x[1] * y; };
  const Field f = sample_field(g, poly);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> X(-3.0, 3.0);
  std::uniform_real_distribution<double> Y(-2.0, 0.0);
  for (int k = 0; k < 200; ++k) {
    const PlanePoint x{X(rng), X(rng)};
    const double y = Y(rng);
    const double exact = poly(x, y);
    EXPECT_NEAR(interpolate(f, x, y), exact, 1e-14 * std::max(1.0, std::abs(exact)) * 10);
  }
}

TEST(Interpolate, OutsideThrows) {
  const Grid g = make(1, 4.0, 4.0, 9, 5);
  const Field f(g, 0.0);
  try {
    (void)interpolate(f, {5.0, 0.0}, -1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfDomain);
  }
  EXPECT_THROW((void)interpolate(f, {0.0, 0.0}, 0.5), Error);
}

TEST(Snapshot, RoundTripIsExact) {
  const Grid g = make(2, 3.0, 2.0, 7, 5);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f(g);
  for (double& v : f.values()) v = U(rng) / 3.0;
  std::stringstream ss;
  write_field_csv(ss, f);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "i1,i2,j,x1,x2,y,u");
  const Field back = read_field_csv(ss, g);
  EXPECT_TRUE(back == f);
}

TEST(Snapshot, HeaderForOnePlaneAxis) {
  const Grid g = make(1, 4.0, 4.0, 9, 5);
  std::stringstream ss;
  write_field_csv(ss, Field(g, 0.25));
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "i,j,x,y,u");
  std::string row;
  std::getline(ss, row);
  EXPECT_EQ(row, "0,0,-4,-4,0.25");
}

TEST(Snapshot, WrongGridRejected) {
  const Grid g = make(1, 4.0, 4.0, 9, 5);
  std::stringstream ss;
  write_field_csv(ss, Field(g, 0.0));
  try {
    (void)read_field_csv(ss, make(1, 4.0, 4.0, 11, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}
