#include "fbp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "fbp/csv.hpp"
#include "fbp/error.hpp"

namespace fbp {

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  if (spec.plane_dim != 1 && spec.plane_dim != 2) {
    throw Error(ErrorCode::InvalidGrid, "plane_dim must be 1 or 2, got " + std::to_string(spec.plane_dim));
  }
  if (!(spec.half_width > 0.0) || !std::isfinite(spec.half_width)) {
    throw Error(ErrorCode::InvalidGrid, "half_width must be positive");
  }
  if (!(spec.depth > 0.0) || !std::isfinite(spec.depth)) {
    throw Error(ErrorCode::InvalidGrid, "depth must be positive");
  }
  if (spec.nx < 3 || spec.ny < 2) {
    throw Error(ErrorCode::InvalidGrid, "need nx >= 3 and ny >= 2");
  }
  if (spec.nx % 2 == 0) {
    throw Error(ErrorCode::EvenNodeCount, "nx must be odd so that x = 0 is a node, got " + std::to_string(spec.nx));
  }
  if (spec.geometry == Geometry::Axisymmetric && spec.lateral_bc != LateralBc::Dirichlet) {
    throw Error(ErrorCode::InvalidGrid, "axisymmetric grids use a Dirichlet outer face");
  }
  const double span = spec.geometry == Geometry::Axisymmetric ? spec.half_width : 2.0 * spec.half_width;
  hx_ = span / (spec.nx - 1);
  hy_ = spec.depth / (spec.ny - 1);
  plane_axes_ = spec.geometry == Geometry::Axisymmetric ? 1 : spec.plane_dim;
  plane_size_ = static_cast<std::size_t>(spec.nx);
  if (plane_axes_ == 2) plane_size_ *= static_cast<std::size_t>(spec.nx);
}

Grid build_grid(const GridSpec& spec) { return Grid(spec); }

double Grid::coord(int i) const noexcept {
  const int n1 = spec_.nx - 1;
  if (axisymmetric()) return spec_.half_width * static_cast<double>(i) / n1;
  // exact 0 at the centre node and exact +-R at the faces
  return spec_.half_width * static_cast<double>(2 * i - n1) / n1;
}

double Grid::y(int j) const noexcept {
  const int n1 = spec_.ny - 1;
  return -spec_.depth * static_cast<double>(n1 - j) / n1;
}

PlanePoint Grid::plane_point(std::size_t p) const noexcept {
  const auto m = plane_multi(p);
  PlanePoint x{coord(m[0]), 0.0};
  if (plane_axes_ == 2) x[1] = coord(m[1]);
  return x;
}

double Grid::radius(std::size_t p) const noexcept {
  const auto x = plane_point(p);
  return std::hypot(x[0], x[1]);
}

int Grid::axis_index(double x) const noexcept {
  const int n1 = spec_.nx - 1;
  if (axisymmetric()) return static_cast<int>(std::lround(x / spec_.half_width * n1));
  return static_cast<int>(std::lround((x / spec_.half_width * n1 + n1) / 2.0));
}

int Grid::depth_index(double y) const noexcept {
  const int n1 = spec_.ny - 1;
  return n1 - static_cast<int>(std::lround(-y / spec_.depth * n1));
}

bool Grid::on_lateral_face(std::size_t p) const noexcept {
  const auto m = plane_multi(p);
  const int last = spec_.nx - 1;
  if (axisymmetric()) return m[0] == last;
  if (m[0] == 0 || m[0] == last) return true;
  return plane_axes_ == 2 && (m[1] == 0 || m[1] == last);
}

bool Grid::same_lattice(const Grid& o) const noexcept {
  return spec_.plane_dim == o.spec_.plane_dim && spec_.nx == o.spec_.nx && spec_.ny == o.spec_.ny &&
         spec_.half_width == o.spec_.half_width && spec_.depth == o.spec_.depth &&
         spec_.geometry == o.spec_.geometry && spec_.lateral_bc == o.spec_.lateral_bc;
}

Field::Field(Grid grid, double fill) : grid_(std::move(grid)), values_(grid_.size(), fill) {}

Field::Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::GridMismatch, "field has " + std::to_string(values_.size()) + " values, grid has " +
                                             std::to_string(grid_.size()) + " nodes");
  }
}

std::span<double> Field::plane_view() noexcept {
  return std::span<double>(values_).subspan(grid_.index(0, grid_.top()), grid_.plane_size());
}

std::span<const double> Field::plane_view() const noexcept {
  return std::span<const double>(values_).subspan(grid_.index(0, grid_.top()), grid_.plane_size());
}

PlaneField plane_trace(const Field& f) {
  const auto v = f.plane_view();
  return PlaneField{f.grid(), std::vector<double>(v.begin(), v.end())};
}

namespace {

// Cell containing coordinate x along an axis of n nodes starting at x0 with
// spacing h; returns (lower index, local coordinate in [0,1]).
std::pair<int, double> locate(double x, double x0, double h, int n) {
  const double s = (x - x0) / h;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i, 0, n - 2);
  return {i, s - i};
}

double lerp(double a, double b, double t) { return a + t * (b - a); }

void check_inside(const Grid& g, const PlanePoint& x, bool check_y, double y) {
  const double tol = 1e-12 * std::max(1.0, g.half_width());
  const double lo = g.axisymmetric() ? 0.0 : -g.half_width();
  for (int a = 0; a < g.plane_axes(); ++a) {
    if (x[a] < lo - tol || x[a] > g.half_width() + tol) {
      throw Error(ErrorCode::OutOfDomain, "plane coordinate outside the box");
    }
  }
  if (check_y && (y < -g.depth() - 1e-12 * g.depth() || y > 1e-12 * g.depth())) {
    throw Error(ErrorCode::OutOfDomain, "depth coordinate outside the box");
  }
}

}  // namespace

double interpolate_plane(const Grid& g, std::span<const double> plane, const PlanePoint& x) {
  check_inside(g, x, false, 0.0);
  const double x0 = g.coord(0);
  const auto [i, tx] = locate(x[0], x0, g.hx(), g.nx());
  if (g.plane_axes() == 1) return lerp(plane[g.plane_index(i)], plane[g.plane_index(i + 1)], tx);
  const auto [k, tz] = locate(x[1], x0, g.hx(), g.nx());
  const double a = lerp(plane[g.plane_index(i, k)], plane[g.plane_index(i + 1, k)], tx);
  const double b = lerp(plane[g.plane_index(i, k + 1)], plane[g.plane_index(i + 1, k + 1)], tx);
  return lerp(a, b, tz);
}

double interpolate(const Field& f, const PlanePoint& x, double y) {
  const Grid& g = f.grid();
  check_inside(g, x, true, y);
  const auto [j, ty] = locate(y, -g.depth(), g.hy(), g.ny());
  const auto all = f.values();
  const double lo = interpolate_plane(g, all.subspan(g.index(0, j), g.plane_size()), x);
  const double hi = interpolate_plane(g, all.subspan(g.index(0, j + 1), g.plane_size()), x);
  return lerp(lo, hi, ty);
}

void write_field_csv(std::ostream& out, const Field& f) {
  const Grid& g = f.grid();
  const bool two = g.plane_axes() == 2;
  out << (two ? "i1,i2,j,x1,x2,y,u\n" : "i,j,x,y,u\n");
  for (int j = 0; j < g.ny(); ++j) {
    const std::string yj = format_double(g.y(j));
    for (std::size_t p = 0; p < g.plane_size(); ++p) {
      const auto m = g.plane_multi(p);
      const auto x = g.plane_point(p);
      out << m[0] << ',';
      if (two) out << m[1] << ',';
      out << j << ',' << format_double(x[0]) << ',';
      if (two) out << format_double(x[1]) << ',';
      out << yj << ',' << format_double(f.at(p, j)) << '\n';
    }
  }
}

Field read_field_csv(std::istream& in, const Grid& grid) {
  const CsvTable t = read_csv(in);
  const bool two = grid.plane_axes() == 2;
  const std::size_t ci = t.column(two ? "i1" : "i");
  const std::size_t cj = t.column("j");
  const std::size_t cu = t.column("u");
  const std::size_t ck = two ? t.column("i2") : 0;
  if (t.rows.size() != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "snapshot has " + std::to_string(t.rows.size()) + " rows, grid has " +
                                             std::to_string(grid.size()) + " nodes");
  }
  Field f(grid);
  for (const auto& row : t.rows) {
    const int i = static_cast<int>(row[ci]);
    const int k = two ? static_cast<int>(row[ck]) : 0;
    const int j = static_cast<int>(row[cj]);
    if (i < 0 || i >= grid.nx() || k < 0 || k >= grid.nx() || j < 0 || j >= grid.ny()) {
      throw Error(ErrorCode::GridMismatch, "snapshot index out of range");
    }
    f.at(grid.plane_index(i, k), j) = row[cu];
  }
  return f;
}

}  // namespace fbp
