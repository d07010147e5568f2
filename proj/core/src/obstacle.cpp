#include "fbp/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbp/csv.hpp"
#include "fbp/error.hpp"

namespace fbp {

ObstacleSpec ObstacleSpec::parabolic_skirt(double rho0, PlanePoint center) {
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) throw Error(ErrorCode::InvalidObstacle, "rho0 must be positive");
  ObstacleSpec s;
  s.profile_ = ObstacleProfile::ParabolicSkirt;
  s.rho0_ = rho0;
  s.center_ = center;
  return s;
}

ObstacleSpec ObstacleSpec::custom_radial(std::vector<std::pair<double, double>> table, double rho0,
                                         PlanePoint center) {
  if (!(rho0 > 0.0)) throw Error(ErrorCode::InvalidObstacle, "rho0 must be positive");
  if (table.size() < 3) throw Error(ErrorCode::InvalidObstacle, "radial table needs at least 3 rows");
  if (table.front().first != 0.0) throw Error(ErrorCode::InvalidObstacle, "radial table must start at r = 0");
  const double edge = 1.0 + rho0;
  constexpr double kTol = 1e-12;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto [r, v] = table[k];
    if (k > 0 && !(r > table[k - 1].first)) throw Error(ErrorCode::InvalidObstacle, "r must increase");
    if (r <= 1.0 && std::abs(v - 1.0) > kTol) {
      throw Error(ErrorCode::InvalidObstacle, "plateau violated: phi != 1 at r = " + format_double(r));
    }
    if (r >= edge && v > kTol) {
      throw Error(ErrorCode::InvalidObstacle, "support violated: phi > 0 at r = " + format_double(r));
    }
    if (k > 0 && v > table[k - 1].second + kTol) {
      throw Error(ErrorCode::InvalidObstacle, "phi increases at r = " + format_double(r));
    }
  }
  if (table.back().first < edge) throw Error(ErrorCode::InvalidObstacle, "table must reach r = 1 + rho0");
  for (std::size_t k = 1; k + 1 < table.size(); ++k) {
    const auto [r0, v0] = table[k - 1];
    const auto [r1, v1] = table[k];
    const auto [r2, v2] = table[k + 1];
    if (r1 <= 1.0 || r1 >= edge || v1 <= 0.0) continue;
    const double second = (v2 - v1) / (r2 - r1) - (v1 - v0) / (r1 - r0);
    if (!(second < 0.0)) {
      throw Error(ErrorCode::InvalidObstacle, "phi not strictly concave at r = " + format_double(r1));
    }
  }
  ObstacleSpec s;
  s.profile_ = ObstacleProfile::CustomRadial;
  s.rho0_ = rho0;
  s.center_ = center;
  s.table_ = std::move(table);
  return s;
}

ObstacleSpec ObstacleSpec::custom_radial_file(const std::string& path, double rho0, PlanePoint center) {
  return custom_radial(read_two_column_csv(path), rho0, center);
}

ObstacleSpec ObstacleSpec::constant(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::InvalidObstacle, "constant obstacle must be finite");
  ObstacleSpec s;
  s.profile_ = ObstacleProfile::Constant;
  s.value_ = value;
  s.rho0_ = std::numeric_limits<double>::infinity();
  return s;
}

double ObstacleSpec::distance_from_center(const PlanePoint& x) const noexcept {
  return std::hypot(x[0] - center_[0], x[1] - center_[1]);
}

double ObstacleSpec::phi_radial(double r) const noexcept {
  switch (profile_) {
    case ObstacleProfile::Constant:
      return value_;
    case ObstacleProfile::ParabolicSkirt: {
      if (r <= 1.0) return 1.0;
      if (r >= 1.0 + rho0_) return 0.0;
      const double t = (r - 1.0) / rho0_;
      return 1.0 - t * t;
    }
    case ObstacleProfile::CustomRadial: {
      if (r >= table_.back().first) return table_.back().second;
      const auto it = std::upper_bound(table_.begin(), table_.end(), r,
                                       [](double v, const auto& row) { return v < row.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (r - lo.first) / (hi.first - lo.first);
      return lo.second + t * (hi.second - lo.second);
    }
  }
  return 0.0;
}

double ObstacleSpec::phi(const PlanePoint& x) const noexcept { return phi_radial(distance_from_center(x)); }

double ObstacleSpec::support_radius() const noexcept {
  if (profile_ == ObstacleProfile::Constant) return std::numeric_limits<double>::infinity();
  return 1.0 + rho0_;
}

bool ObstacleSpec::in_coincidence_candidate(const PlanePoint& x) const noexcept {
  return distance_from_center(x) <= support_radius();
}

double ObstacleSpec::max_value() const noexcept {
  return profile_ == ObstacleProfile::Constant ? value_ : 1.0;
}

std::vector<double> ObstacleSpec::sample(const Grid& grid) const {
  std::vector<double> out(grid.plane_size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = phi(grid.plane_point(p));
  return out;
}

}  // namespace fbp
