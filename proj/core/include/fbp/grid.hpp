#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace fbp {

enum class Geometry {
  Cartesian,     // plane lattice is [-R,R]^N
  Axisymmetric,  // plane lattice is r in [0,R]; N enters only through (N-1)/r
};

enum class LateralBc {
  Dirichlet,  // u = 0 on the lateral faces
  Neumann,    // mirror ghost nodes; used by the slab test mode
};

struct GridSpec {
  int plane_dim = 1;  // N
  double half_width = 6.0;  // R
  double depth = 4.0;  // L
  int nx = 513;
  int ny = 257;
  Geometry geometry = Geometry::Cartesian;
  LateralBc lateral_bc = LateralBc::Dirichlet;
};

/// Plane coordinates; unused components are zero. In axisymmetric grids
/// component 0 is the radius.
using PlanePoint = std::array<double, 2>;

/// Truncated lower half-space lattice [-R,R]^N x [-L,0] (or [0,R] x [-L,0]
/// in the axisymmetric reduction).
///
/// Node (p, j) has plane index p and depth index j. Storage is plane-major:
/// each horizontal layer of constant j is contiguous, flat = j * plane_size + p,
/// so the plane y = 0 is the last block. For N = 2, p = i1 + nx * i2.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);

  [[nodiscard]] const GridSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] int plane_dim() const noexcept { return spec_.plane_dim; }
  [[nodiscard]] Geometry geometry() const noexcept { return spec_.geometry; }
  [[nodiscard]] bool axisymmetric() const noexcept { return spec_.geometry == Geometry::Axisymmetric; }
  [[nodiscard]] int nx() const noexcept { return spec_.nx; }
  [[nodiscard]] int ny() const noexcept { return spec_.ny; }
  [[nodiscard]] double hx() const noexcept { return hx_; }
  [[nodiscard]] double hy() const noexcept { return hy_; }
  [[nodiscard]] double half_width() const noexcept { return spec_.half_width; }
  [[nodiscard]] double depth() const noexcept { return spec_.depth; }

  /// Number of lattice axes in the plane (N, or 1 when axisymmetric).
  [[nodiscard]] int plane_axes() const noexcept { return plane_axes_; }
  [[nodiscard]] std::size_t plane_size() const noexcept { return plane_size_; }
  [[nodiscard]] std::size_t size() const noexcept { return plane_size_ * static_cast<std::size_t>(spec_.ny); }
  [[nodiscard]] int top() const noexcept { return spec_.ny - 1; }

  [[nodiscard]] std::size_t index(std::size_t p, int j) const noexcept {
    return static_cast<std::size_t>(j) * plane_size_ + p;
  }
  [[nodiscard]] std::size_t plane_index(int i1, int i2 = 0) const noexcept {
    return static_cast<std::size_t>(i1) + static_cast<std::size_t>(spec_.nx) * static_cast<std::size_t>(i2);
  }
  [[nodiscard]] std::array<int, 2> plane_multi(std::size_t p) const noexcept {
    const auto n = static_cast<std::size_t>(spec_.nx);
    return {static_cast<int>(p % n), static_cast<int>(p / n)};
  }

  /// Coordinate of lattice index i along a plane axis.
  [[nodiscard]] double coord(int i) const noexcept;
  [[nodiscard]] double y(int j) const noexcept;
  [[nodiscard]] PlanePoint plane_point(std::size_t p) const noexcept;
  /// |x| (Cartesian) or r (axisymmetric).
  [[nodiscard]] double radius(std::size_t p) const noexcept;

  /// Inverse of coord/y for on-lattice coordinates.
  [[nodiscard]] int axis_index(double x) const noexcept;
  [[nodiscard]] int depth_index(double y) const noexcept;

  /// True for plane indices on a lateral face carrying boundary data
  /// (Cartesian: any index at 0 or nx-1; axisymmetric: r = R only).
  [[nodiscard]] bool on_lateral_face(std::size_t p) const noexcept;

  [[nodiscard]] bool same_lattice(const Grid& other) const noexcept;

 private:
  GridSpec spec_;
  double hx_ = 0.0;
  double hy_ = 0.0;
  int plane_axes_ = 1;
  std::size_t plane_size_ = 0;
};

/// Validating constructor; throws Error(EvenNodeCount | InvalidGrid).
Grid build_grid(const GridSpec& spec);

/// Values on the plane lattice (one per plane index).
struct PlaneField {
  Grid grid;
  std::vector<double> values;
};

/// Nodal scalar field on a Grid.
class Field {
 public:
  explicit Field(Grid grid, double fill = 0.0);
  Field(Grid grid, std::vector<double> values);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double& at(std::size_t p, int j) noexcept { return values_[grid_.index(p, j)]; }
  [[nodiscard]] double at(std::size_t p, int j) const noexcept { return values_[grid_.index(p, j)]; }

  /// Write-through view of the y = 0 layer.
  [[nodiscard]] std::span<double> plane_view() noexcept;
  [[nodiscard]] std::span<const double> plane_view() const noexcept;

  friend bool operator==(const Field& a, const Field& b) {
    return a.grid_.same_lattice(b.grid_) && a.values_ == b.values_;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Copy of the y = 0 layer. Use Field::plane_view() for a write-through view.
PlaneField plane_trace(const Field& f);

/// Samples fn(PlanePoint, y) at every node.
template <class Fn>
Field sample_field(const Grid& grid, Fn&& fn) {
  Field f(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    const double y = grid.y(j);
    for (std::size_t p = 0; p < grid.plane_size(); ++p) f.at(p, j) = fn(grid.plane_point(p), y);
  }
  return f;
}

/// Multilinear interpolation; throws Error(OutOfDomain) outside the box.
double interpolate(const Field& f, const PlanePoint& x, double y);

/// Linear (N = 1, axisymmetric) or bilinear (N = 2) interpolation on the plane.
double interpolate_plane(const Grid& grid, std::span<const double> plane, const PlanePoint& x);

/// Snapshot CSV. Header `i,j,x,y,u` for one plane axis,
/// `i1,i2,j,x1,x2,y,u` for N = 2; 17 significant digits.
void write_field_csv(std::ostream& out, const Field& f);
Field read_field_csv(std::istream& in, const Grid& grid);

}  // namespace fbp
