#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "fbp/grid.hpp"
#include "fbp/obstacle.hpp"
#include "fbp/solver.hpp"

namespace fbp {

inline constexpr double kNoPsi = std::numeric_limits<double>::quiet_NaN();

using BoundarySegment = std::array<PlanePoint, 2>;

/// Free surface, contact set and plane traces of a converged solve.
struct FreeBoundary {
  Grid grid;
  /// Per plane column: y of the last upward crossing of u = level_used,
  /// NaN ("none") where the column never reaches the level.
  std::vector<double> psi;
  std::vector<std::uint8_t> omega_mask;        // u(x,0) > plane_threshold
  std::vector<std::uint8_t> coincidence_mask;  // u - phi <= coincidence_tol and phi > 0
  std::vector<PlanePoint> boundary_points;     // crossings of the threshold on the plane
  std::vector<BoundarySegment> boundary_segments;  // N = 2 contour pieces
  std::vector<double> u0;                      // plane trace
  std::vector<double> uy;                      // one-sided u_y on the plane
  std::vector<double> phi;
  double level_used = 0.0;
  double plane_threshold = 0.0;
  double coincidence_tol = 0.0;
  double eps = 0.0;
  long graph_violations = 0;       // columns with more than one upward crossing
  bool truncation_suspect = false;  // Omega reaches the lateral faces or has no boundary

  FreeBoundary() : grid(GridSpec{.plane_dim = 1, .half_width = 1.0, .depth = 1.0, .nx = 3, .ny = 3}) {}
};

struct FbOptions {
  double level_factor = 1.0;     // level = level_factor * eps_final
  double plane_threshold = -1.0;  // negative: use the level
  double coincidence_tol = -1.0;  // negative: 10 * tol of the result
  bool require_converged = true;
};

/// Per-column psi. Throws Error(NotConverged) for an unconverged result.
/// `violations` (optional) receives the number of columns with more than
/// one upward crossing.
std::vector<double> extract_psi(const SolveResult& res, double level_factor = 1.0, long* violations = nullptr);
std::vector<double> extract_psi(const Field& f, double level, long* violations = nullptr);

struct OmegaExtract {
  std::vector<std::uint8_t> mask;
  std::vector<PlanePoint> points;
  std::vector<BoundarySegment> segments;
  bool truncation_suspect = false;
};

/// Omega = {u(x,0) > threshold} with its boundary by linear interpolation
/// of the threshold crossings (marching squares for N = 2). Throws
/// Error(EmptyOmega) when the mask is empty.
OmegaExtract extract_omega(const Grid& grid, const std::vector<double>& trace, double threshold);
OmegaExtract extract_omega(const SolveResult& res, double threshold);

/// One-sided second-order u_y at every plane node.
std::vector<double> uy_trace(const Field& f);
std::vector<double> uy_trace(const SolveResult& res);

/// e . grad u(x,0) by centred differences, one-sided second order at the
/// ends of each axis. In axisymmetric grids only e[0] (the radial
/// component) is used.
std::vector<double> directional_derivative_plane(const Field& f, const PlanePoint& e);
std::vector<double> directional_derivative_plane(const SolveResult& res, const PlanePoint& e);

/// Everything above in one pass.
FreeBoundary extract_free_boundary(const SolveResult& res, const ObstacleSpec& ob, const FbOptions& opts = {});

/// Distance from a plane point to the extracted boundary (exact
/// point-to-segment distance for N = 2). Infinite when there is none.
double distance_to_boundary(const FreeBoundary& fb, const PlanePoint& x);

/// `fb.csv`: x..., psi, u0, uy, in_omega, in_coincidence (psi empty where
/// undefined). `boundary.csv`: one row per boundary point (N = 1,
/// axisymmetric) or segment endpoint pair (N = 2).
void write_fb_csv(std::ostream& out, const FreeBoundary& fb);
void write_boundary_csv(std::ostream& out, const FreeBoundary& fb);

}  // namespace fbp
