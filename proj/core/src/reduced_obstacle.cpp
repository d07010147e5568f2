#include "fbp/reduced_obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbp/csv.hpp"
#include "fbp/error.hpp"
#include "fbp/operators.hpp"

namespace fbp {

namespace {

std::vector<std::uint8_t> unknown_mask(const ReducedProblem& p, const PlaneLaplacian& lap) {
  std::vector<std::uint8_t> m(p.grid.plane_size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = (!lap.row(k).fixed && std::isnan(p.dirichlet[k])) ? 1 : 0;
  return m;
}

void check(const ReducedProblem& p) {
  const std::size_t n = p.grid.plane_size();
  if (p.g.size() != n || p.dirichlet.size() != n) {
    throw Error(ErrorCode::InvalidParams, "reduced problem arrays must be plane sized");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (std::isnan(p.dirichlet[k]) && !(p.g[k] >= 0.0)) {
      throw Error(ErrorCode::InvalidParams, "g must be nonnegative at unknown node " + std::to_string(k));
    }
  }
}

double hausdorff_half(const std::vector<PlanePoint>& a, const std::vector<PlanePoint>& b) {
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) best = std::min(best, std::hypot(x[0] - y[0], x[1] - y[1]));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

ReducedProblem reduced_from_full(const FreeBoundary& fb, const ObstacleSpec& ob) {
  const Grid& g = fb.grid;
  ReducedProblem p{g, std::vector<double>(g.plane_size()), std::vector<double>(g.plane_size(), kFreeNode), true};
  for (std::size_t k = 0; k < g.plane_size(); ++k) {
    p.g[k] = std::max(fb.uy[k], 0.0);
    if (ob.distance_from_center(g.plane_point(k)) <= ob.support_radius()) p.dirichlet[k] = fb.u0[k];
    if (g.on_lateral_face(k)) p.dirichlet[k] = 0.0;
  }
  return p;
}

std::vector<double> reduced_residual(const ReducedProblem& p, const std::vector<double>& w) {
  const PlaneLaplacian lap(p.grid);
  const auto free = unknown_mask(p, lap);
  std::vector<double> r(w.size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (free[k] != 0) r[k] = std::abs(std::min(w[k], lap.apply(w, k) + p.g[k]));
  }
  return r;
}

ReducedSolution solve_reduced(const ReducedProblem& p, const ReducedParams& params) {
  check(p);
  if (!(params.omega > 0.0 && params.omega < 2.0)) throw Error(ErrorCode::InvalidParams, "omega must lie in (0, 2)");
  const Grid& g = p.grid;
  const PlaneLaplacian lap(g);
  const auto free = unknown_mask(p, lap);

  std::vector<double> w(g.plane_size(), 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (free[k] == 0) w[k] = std::isnan(p.dirichlet[k]) ? 0.0 : p.dirichlet[k];
  }

  ReducedSolution out{PlaneField{g, {}}};
  for (long it = 1; it <= params.max_iters; ++it) {
    double change = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (free[k] == 0) continue;
      const PlaneRow& row = lap.row(k);
      double s = -p.g[k];
      for (int m = 0; m < row.count; ++m) s += row.w[m] * w[row.nb[m]];
      const double gs = s / row.diag;
      const double next = std::max(0.0, w[k] + params.omega * (gs - w[k]));
      change = std::max(change, std::abs(next - w[k]));
      w[k] = next;
    }
    if (change <= params.tol) {
      out.iterations = it;
      const auto r = reduced_residual(p, w);
      out.comp_residual = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
      out.w.values = std::move(w);
      return out;
    }
  }
  throw Error(ErrorCode::MaxItersExceeded, "reduced PSOR did not converge in " + std::to_string(params.max_iters) +
                                               " sweeps");
}

BoundaryDistance compare_boundaries(const FreeBoundary& fb_full, const PlaneField& w, double threshold) {
  const Grid& g = fb_full.grid;
  if (!g.same_lattice(w.grid) || w.values.size() != g.plane_size()) {
    throw Error(ErrorCode::GridMismatch, "reduced field lives on a different lattice");
  }
  if (fb_full.boundary_points.empty()) throw Error(ErrorCode::EmptyBoundary, "full solve has no free boundary");

  BoundaryDistance d;
  d.threshold = threshold;
  const double h = g.hx();
  auto cross = [&](double a, double b, double ua, double ub) { return a + (threshold - ua) / (ub - ua) * (b - a); };
  if (g.plane_axes() == 1) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const double a = w.values[static_cast<std::size_t>(i)];
      const double b = w.values[static_cast<std::size_t>(i) + 1];
      if ((a > threshold) != (b > threshold)) d.reduced_points.push_back({cross(g.coord(i), g.coord(i + 1), a, b), 0.0});
    }
  } else {
    for (int i2 = 0; i2 < g.nx(); ++i2) {
      for (int i1 = 0; i1 < g.nx(); ++i1) {
        const std::size_t p = g.plane_index(i1, i2);
        if (i1 + 1 < g.nx()) {
          const std::size_t q = g.plane_index(i1 + 1, i2);
          if ((w.values[p] > threshold) != (w.values[q] > threshold)) {
            d.reduced_points.push_back({cross(g.coord(i1), g.coord(i1 + 1), w.values[p], w.values[q]), g.coord(i2)});
          }
        }
        if (i2 + 1 < g.nx()) {
          const std::size_t q = g.plane_index(i1, i2 + 1);
          if ((w.values[p] > threshold) != (w.values[q] > threshold)) {
            d.reduced_points.push_back({g.coord(i1), cross(g.coord(i2), g.coord(i2 + 1), w.values[p], w.values[q])});
          }
        }
      }
    }
  }
  if (d.reduced_points.empty()) {
    throw Error(ErrorCode::EmptyBoundary, "w has no crossing of " + format_double(threshold));
  }
  d.full_to_reduced_cells = hausdorff_half(fb_full.boundary_points, d.reduced_points) / h;
  d.reduced_to_full_cells = hausdorff_half(d.reduced_points, fb_full.boundary_points) / h;
  d.hausdorff_cells = std::max(d.full_to_reduced_cells, d.reduced_to_full_cells);
  return d;
}

}  // namespace fbp
