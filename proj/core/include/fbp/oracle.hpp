#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "fbp/penalty.hpp"

namespace fbp {

/// Exact planar solution (y + M)^+ with the free surface at y = -M.
/// Throws Error(InvalidParams) unless M > 0.
double slab_exact(double M, double y);

/// One-dimensional penalized profile: -u'' + beta_eps(u) = 0 on y < 0,
/// u(0) = M, u -> 0 as y -> -inf, obtained from the first integral
/// u'^2 / 2 = B_eps(u).
struct OracleProfile {
  double M = 0.0;
  double eps = 0.0;
  std::vector<double> y;
  std::vector<double> u;
  double slope_at_plane = 0.0;  // u'(0-) = sqrt(2 B_eps(M))

  /// Monotone cubic (PCHIP) interpolation of the samples; clamps outside
  /// the sampled range to the end values.
  [[nodiscard]] double value(double y) const;
};

/// Depth at which the profile takes the value u in (0, M]:
/// y(u) = -int_u^M dv / sqrt(2 B_eps(v)), by adaptive Gauss-Kronrod
/// quadrature in log v (relative tolerance 1e-10). Throws
/// Error(QuadratureFailure) when the error estimate is not met.
double ode1d_depth(const PenaltyFamily& fam, double M, double eps, double u);

/// Profile values at the given depths (all <= 0) by inverting ode1d_depth.
/// Throws Error(InvalidParams) for M <= 0 or positive samples,
/// Error(NonpositiveEps), Error(QuadratureFailure).
OracleProfile ode1d_penalized(const PenaltyFamily& fam, double M, double eps, std::span<const double> y_samples);

/// Two-column CSV `y,u`.
void write_profile_csv(std::ostream& out, const OracleProfile& profile);

/// Exact solution of the discrete one-dimensional obstacle problem
///   w >= 0,  -w'' + g >= 0,  w (-w'' + g) = 0
/// on n interior nodes of spacing h with Dirichlet data at both ends, by
/// enumerating all 2^n active sets. Requires n <= 20. Throws
/// Error(NoFeasibleActiveSet) when no active set is complementary.
std::vector<double> brute_obstacle_1d(std::span<const double> g, std::pair<double, double> dirichlet,
                                      double h = 1.0);

}  // namespace fbp
