#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fbp/grid.hpp"
#include "fbp/obstacle.hpp"
#include "fbp/penalty.hpp"

namespace fbp {

/// One row of the discrete plane operator: -Delta_x u(p) ~ diag u_p - sum w_k u_{nb_k}.
/// Lateral Dirichlet nodes are `fixed` and carry no stencil.
struct PlaneRow {
  std::array<std::uint32_t, 4> nb{};
  std::array<double, 4> w{};
  int count = 0;
  double diag = 0.0;
  bool fixed = false;
};

/// Second-order plane Laplacian on the plane lattice: centred differences in
/// Cartesian grids, -u_rr - (N-1)/r u_r in the axisymmetric reduction with
/// the r = 0 row 2N (u(h) - u(0)) / h^2. Neumann faces mirror the interior
/// neighbour.
class PlaneLaplacian {
 public:
  explicit PlaneLaplacian(const Grid& grid);

  [[nodiscard]] const PlaneRow& row(std::size_t p) const noexcept { return rows_[p]; }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

  /// (-Delta_x u)(p) for a plane layer.
  [[nodiscard]] double apply(std::span<const double> layer, std::size_t p) const noexcept {
    const PlaneRow& r = rows_[p];
    double s = r.diag * layer[p];
    for (int k = 0; k < r.count; ++k) s -= r.w[k] * layer[r.nb[k]];
    return s;
  }

 private:
  std::vector<PlaneRow> rows_;
};

/// Residual arrays of the penalized system.
///  interior: full-field sized, -Delta_h u + beta_eps(u) at nodes with
///            -L < y < 0 off the Dirichlet faces, 0 elsewhere;
///  plane:    plane sized, -Delta_{x,h} u + D_y u at y = 0, 0 on Dirichlet faces;
///  comp:     plane sized, min(u - phi, plane).
struct ResidualField {
  std::vector<double> interior;
  std::vector<double> plane;
  std::vector<double> comp;
  double interior_sup = 0.0;
  double comp_sup = 0.0;
};

[[nodiscard]] double sup_norm(std::span<const double> v) noexcept;

/// One-sided second-order normal derivative (3u_j - 4u_{j-1} + u_{j-2}) / (2 hy)
/// at the plane node p.
[[nodiscard]] double uy_at_plane(const Field& f, std::size_t p) noexcept;

std::vector<double> interior_residual(const Field& f, const PenaltyFamily& fam, double eps);
/// Laplacian part only (the penalty switched off).
std::vector<double> interior_residual(const Field& f);
/// Throws Error(GridTooShallow) when ny < 3.
std::vector<double> plane_residual(const Field& f);
std::vector<double> complementarity_residual(const Field& f, const ObstacleSpec& ob);
ResidualField residuals(const Field& f, const PenaltyFamily& fam, double eps, const ObstacleSpec& ob);

/// Axisymmetric entry points; throw Error(InvalidGrid) on Cartesian grids.
std::vector<double> axisym_interior_residual(const Field& f, const PenaltyFamily& fam, double eps);
std::vector<double> axisym_interior_residual(const Field& f);
std::vector<double> axisym_plane_residual(const Field& f);

/// Discrete energies. `descent` is the functional whose Euler-Lagrange
/// equations are the discretised PDE (1/2 on both gradient terms); `j_r`
/// drops the halves, matching the form the construction is stated with.
/// Axisymmetric grids weight by r^(N-1).
struct EnergyValues {
  double descent = 0.0;
  double j_r = 0.0;
};
EnergyValues energy(const Field& f, const PenaltyFamily& fam, double eps);

}  // namespace fbp
