#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fbp/grid.hpp"

namespace fbp {

enum class ObstacleProfile {
  ParabolicSkirt,  // 1 on |x| <= 1, 1 - ((r-1)/rho0)^2 on the skirt, 0 beyond
  CustomRadial,    // piecewise-linear radial table
  Constant,        // phi == value on the whole plane (slab test mode)
};

/// Radial plane obstacle phi: plateau 1 on the unit ball, concave skirt of
/// width rho0, support inside the ball of radius 1 + rho0.
class ObstacleSpec {
 public:
  static ObstacleSpec parabolic_skirt(double rho0 = 0.25, PlanePoint center = {0.0, 0.0});
  /// Table (r, phi(r)) with increasing r starting at 0. Validation: phi = 1
  /// for r <= 1, radially nonincreasing, strictly concave (sampled second
  /// differences < 0) where 1 < r < 1 + rho0 and phi > 0, phi <= 0 for
  /// r >= 1 + rho0. Throws Error(InvalidObstacle).
  static ObstacleSpec custom_radial(std::vector<std::pair<double, double>> table, double rho0,
                                    PlanePoint center = {0.0, 0.0});
  static ObstacleSpec custom_radial_file(const std::string& path, double rho0, PlanePoint center = {0.0, 0.0});
  static ObstacleSpec constant(double value);

  [[nodiscard]] ObstacleProfile profile() const noexcept { return profile_; }
  [[nodiscard]] double rho0() const noexcept { return rho0_; }
  [[nodiscard]] const PlanePoint& center() const noexcept { return center_; }

  [[nodiscard]] double phi(const PlanePoint& x) const noexcept;
  [[nodiscard]] double phi_radial(double r) const noexcept;
  /// Radius of the ball containing supp phi^+ (1 + rho0). Infinite for the
  /// constant profile.
  [[nodiscard]] double support_radius() const noexcept;
  [[nodiscard]] bool in_coincidence_candidate(const PlanePoint& x) const noexcept;
  [[nodiscard]] double distance_from_center(const PlanePoint& x) const noexcept;
  [[nodiscard]] double max_value() const noexcept;

  /// phi sampled on the plane lattice.
  [[nodiscard]] std::vector<double> sample(const Grid& grid) const;

 private:
  ObstacleSpec() = default;

  ObstacleProfile profile_ = ObstacleProfile::ParabolicSkirt;
  double rho0_ = 0.25;
  PlanePoint center_{0.0, 0.0};
  double value_ = 1.0;
  std::vector<std::pair<double, double>> table_;
};

}  // namespace fbp
