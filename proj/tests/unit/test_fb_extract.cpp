#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fbp/error.hpp"
#include "fbp/fb_extract.hpp"
#include "fbp/solver.hpp"

using namespace fbp;

namespace {

Grid line(int nx = 41, int ny = 33, double R = 2.0, double L = 2.0) {
  return build_grid(GridSpec{.plane_dim = 1, .half_width = R, .depth = L, .nx = nx, .ny = ny});
}

SolveResult fake_result(Field f, double eps) {
  SolveResult r(std::move(f));
  r.eps_final = eps;
  r.converged = true;
  r.tol = 1e-10;
  return r;
}

}  // namespace

TEST(Psi, SlabLevelSet) {
  const double M = 1.0;
  const Grid g = line();
  const Field f = sample_field(g, [&](const PlanePoint&, double y) { return std::max(y + M, 0.0); });
  for (double lambda : {0.01, 0.1, 0.3}) {
    long viol = -1;
    const auto psi = extract_psi(f, lambda, &viol);
    EXPECT_EQ(viol, 0);
    for (double v : psi) EXPECT_NEAR(v, -M + lambda, 1e-14);
  }
}

TEST(Psi, ColumnBelowLevelHasNone) {
  const Grid g = line();
  const Field f(g, 0.05);
  for (double v : extract_psi(f, 0.1)) EXPECT_TRUE(std::isnan(v));
}

TEST(Psi, MultipleCrossingsCounted) {
  const Grid g = line(5, 33);
  // rises, dips, rises again in every column
  const Field f = sample_field(g, [](const PlanePoint&, double y) { return std::cos(6.0 * y) * 0.5 + 0.5 + 0.1 * y; });
  long viol = 0;
  (void)extract_psi(f, 0.5, &viol);
  EXPECT_EQ(viol, static_cast<long>(g.plane_size()));
}

TEST(Psi, UnconvergedRejected) {
  SolveResult r = fake_result(Field(line(), 0.0), 0.1);
  r.converged = false;
  try {
    (void)extract_psi(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotConverged);
  }
}

TEST(Omega, SkirtCrossingsByInterpolation) {
  const double rho0 = 0.5;
  const auto ob = ObstacleSpec::parabolic_skirt(rho0);
  for (int nx : {81, 161, 321}) {
    const Grid g = line(nx, 3, 2.0);
    const OmegaExtract om = extract_omega(g, ob.sample(g), 0.5);
    ASSERT_EQ(om.points.size(), 2u);
    const double exact = 1.0 + rho0 / std::sqrt(2.0);
    const double err = std::max(std::abs(om.points[0][0] + exact), std::abs(om.points[1][0] - exact));
    // chord error of a parabola: |phi''| h^2 / (8 |phi'|) with |phi''| = 8, |phi'| = 2 sqrt 2
    EXPECT_LE(err, g.hx() * g.hx() / (2.0 * std::sqrt(2.0)) + 1e-15) << nx;
    EXPECT_FALSE(om.truncation_suspect);
  }
}

TEST(Omega, FillingTheBoxFlagsTruncation) {
  const Grid g = line();
  const OmegaExtract om = extract_omega(g, std::vector<double>(g.plane_size(), 1.0), 0.1);
  EXPECT_TRUE(om.truncation_suspect);
  EXPECT_TRUE(om.points.empty());
}

TEST(Omega, EmptyRejected) {
  const Grid g = line();
  try {
    (void)extract_omega(g, std::vector<double>(g.plane_size(), 0.0), 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyOmega);
  }
}

TEST(Omega, MarchingSquaresOnDisc) {
  const Grid g = build_grid(GridSpec{.plane_dim = 2, .half_width = 2.0, .depth = 1.0, .nx = 81, .ny = 3});
  std::vector<double> tr(g.plane_size());
  for (std::size_t p = 0; p < tr.size(); ++p) {
    const PlanePoint x = g.plane_point(p);
    tr[p] = 1.0 - (x[0] * x[0] + x[1] * x[1]);
  }
  const OmegaExtract om = extract_omega(g, tr, 0.0);
  ASSERT_FALSE(om.segments.empty());
  double worst = 0.0;
  double length = 0.0;
  for (const auto& s : om.segments) {
    for (const auto& q : s) worst = std::max(worst, std::abs(std::hypot(q[0], q[1]) - 1.0));
    length += std::hypot(s[1][0] - s[0][0], s[1][1] - s[0][1]);
  }
  EXPECT_LT(worst, g.hx() * g.hx());
  EXPECT_NEAR(length, 2.0 * M_PI, 1e-2);
  EXPECT_FALSE(om.truncation_suspect);
}

TEST(Traces, UyOfLinearSlab) {
  const Grid g = line();
  const Field f = sample_field(g, [](const PlanePoint&, double y) { return std::max(y + 1.0, 0.0); });
  for (double v : uy_trace(f)) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Traces, DirectionalDerivative) {
  const Grid g = build_grid(GridSpec{.plane_dim = 2, .half_width = 2.0, .depth = 1.0, .nx = 21, .ny = 3});
  for (double v : directional_derivative_plane(Field(g, 3.0), {1.0, 0.0})) EXPECT_EQ(v, 0.0);
  const Field f = sample_field(g, [](const PlanePoint& x, double) { return x[0] * x[0] - 2.0 * x[1]; });
  const auto d = directional_derivative_plane(f, {0.6, 0.8});
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    EXPECT_NEAR(d[p], 0.6 * 2.0 * g.plane_point(p)[0] - 1.6, 1e-12);
  }
}

TEST(FreeBoundary, SlabExtraction) {
  const Grid g = line();
  const double eps = 0.1;
  const Field f = sample_field(g, [](const PlanePoint&, double y) { return std::max(y + 1.0, 0.0); });
  const FreeBoundary fb = extract_free_boundary(fake_result(f, eps), ObstacleSpec::constant(1.0));
  EXPECT_EQ(fb.level_used, eps);
  for (double v : fb.psi) EXPECT_NEAR(v, -0.9, 1e-14);
  for (auto m : fb.coincidence_mask) EXPECT_EQ(m, 1);
  EXPECT_TRUE(fb.truncation_suspect);
  EXPECT_TRUE(std::isinf(distance_to_boundary(fb, {0.0, 0.0})));
}

TEST(FreeBoundary, DistanceToPoints) {
  const Grid g = line();
  const auto ob = ObstacleSpec::parabolic_skirt(0.5);
  const Field f = sample_field(g, [&](const PlanePoint& x, double y) { return ob.phi(x) * (1.0 + y / 2.0); });
  FbOptions o;
  o.plane_threshold = 0.5;
  const FreeBoundary fb = extract_free_boundary(fake_result(f, 0.1), ob, o);
  ASSERT_EQ(fb.boundary_points.size(), 2u);
  const double b = fb.boundary_points[1][0];
  EXPECT_NEAR(distance_to_boundary(fb, {0.0, 0.0}), b, 1e-14);
  EXPECT_NEAR(distance_to_boundary(fb, {b + 0.3, 0.0}), 0.3, 1e-14);
}

TEST(FreeBoundary, CsvColumns) {
  const Grid g = line(5, 5);
  const Field f = sample_field(g, [](const PlanePoint&, double y) { return std::max(y + 1.0, 0.0); });
  const FreeBoundary fb = extract_free_boundary(fake_result(f, 0.1), ObstacleSpec::constant(1.0));
  std::stringstream ss;
  write_fb_csv(ss, fb);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "x,psi,u0,uy,in_omega,in_coincidence");
}
