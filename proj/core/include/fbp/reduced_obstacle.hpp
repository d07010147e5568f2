#pragma once

#include <limits>
#include <vector>

#include "fbp/fb_extract.hpp"
#include "fbp/grid.hpp"
#include "fbp/obstacle.hpp"

namespace fbp {

inline constexpr double kFreeNode = std::numeric_limits<double>::quiet_NaN();

/// Plane obstacle problem w >= 0, -Delta_h w + g >= 0, w (-Delta_h w + g) = 0.
/// `dirichlet` is plane sized: NaN marks an unknown, any other value is
/// imposed. Lateral faces that carry no stencil are held at their
/// `dirichlet` value, or 0 when that is NaN.
struct ReducedProblem {
  Grid grid;
  std::vector<double> g;
  std::vector<double> dirichlet;
  bool inner_from_full = false;  // inner data copied from a full solve on supp phi^+
};

/// g = max(u_y, 0) of the full solve, Dirichlet data = full trace on the
/// closed ball |x - c| <= 1 + rho0, 0 on the lateral faces.
ReducedProblem reduced_from_full(const FreeBoundary& fb, const ObstacleSpec& ob);

struct ReducedParams {
  double tol = 1e-13;   // sup of the last sweep's update
  double omega = 1.8;
  long max_iters = 2'000'000;
};

struct ReducedSolution {
  PlaneField w;
  long iterations = 0;
  double comp_residual = 0.0;  // sup over unknowns of |min(w, -Delta_h w + g)|
};

/// Projected SOR. Throws Error(InvalidParams) on size mismatch or
/// negative g, Error(MaxItersExceeded) without convergence.
ReducedSolution solve_reduced(const ReducedProblem& p, const ReducedParams& params = {});

/// Node-wise |min(w, -Delta_h w + g)| over the unknowns.
std::vector<double> reduced_residual(const ReducedProblem& p, const std::vector<double>& w);

struct BoundaryDistance {
  double hausdorff_cells = 0.0;
  double full_to_reduced_cells = 0.0;  // sup over full points of the distance to the reduced set
  double reduced_to_full_cells = 0.0;
  std::vector<PlanePoint> reduced_points;
  double threshold = 0.0;
};

/// Symmetric Hausdorff distance between the extracted boundary of the full
/// solve and the crossings of w = threshold, in units of hx. Throws
/// Error(GridMismatch) for different lattices, Error(EmptyBoundary) when
/// either set is empty.
BoundaryDistance compare_boundaries(const FreeBoundary& fb_full, const PlaneField& w, double threshold = 0.0);

}  // namespace fbp
