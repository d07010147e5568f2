#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fbp {

enum class PenaltyShape {
  RationalCube,  // beta(s) = c s / (1+s)^3
  CustomTable,   // natural cubic spline through (s, beta(s)) samples
};

/// The penalty family beta, beta_eps(u) = beta(u/eps)/eps and the primitive
/// B_eps(u) = B(u/eps) with B(s) = int_0^s beta.
///
/// The mass int_0^inf beta fixes the limiting gradient at the free boundary:
/// the one-dimensional first integral gives |u'| -> sqrt(2 mass), so
/// mass = 1/2 yields |grad u| = 1.
class PenaltyFamily {
 public:
  /// Rational-cube family with c = 2 mass. Throws Error(InvalidPenalty) for
  /// a nonpositive mass or when the quadrature check of the mass fails.
  static PenaltyFamily rational_cube(double mass = 0.5);

  /// Table family. Samples must start at s = 0 with beta(0) = 0, have
  /// strictly increasing s and positive beta for s > 0. beta is taken as 0
  /// beyond the last sample, and the spline is rescaled so that its
  /// integral equals `mass`.
  static PenaltyFamily custom_table(std::vector<std::pair<double, double>> samples, double mass = 0.5);
  static PenaltyFamily custom_table_file(const std::string& path, double mass = 0.5);

  [[nodiscard]] PenaltyShape shape() const noexcept { return shape_; }
  [[nodiscard]] double mass() const noexcept { return mass_; }
  [[nodiscard]] double scale() const noexcept { return c_; }

  /// Checked evaluations (throw NegativeArgument / NonpositiveEps).
  [[nodiscard]] double beta(double s) const;
  [[nodiscard]] double beta_eps(double u, double eps) const;
  [[nodiscard]] double B(double s) const;
  [[nodiscard]] double B_eps(double u, double eps) const;

  /// Unchecked hot-path evaluations used by the solvers; beta is extended by
  /// zero to s < 0.
  [[nodiscard]] double beta_raw(double s) const noexcept {
    if (shape_ != PenaltyShape::RationalCube) return spline_beta(s);
    if (s <= 0.0) return 0.0;
    const double q = 1.0 / (1.0 + s);
    return c_ * s * q * q * q;
  }
  [[nodiscard]] double dbeta_raw(double s) const noexcept {
    if (shape_ != PenaltyShape::RationalCube) return spline_dbeta(s);
    if (s < 0.0) return 0.0;
    const double q = 1.0 / (1.0 + s);
    return c_ * (1.0 - 2.0 * s) * q * q * q * q;
  }
  [[nodiscard]] double B_raw(double s) const noexcept {
    if (shape_ != PenaltyShape::RationalCube) return spline_B(s);
    if (s <= 0.0) return 0.0;
    // closed primitive -1/(1+s) + 1/(2(1+s)^2) + 1/2 = s^2 / (2(1+s)^2)
    const double q = s / (1.0 + s);
    return 0.5 * c_ * q * q;
  }

  /// Numerical integral of beta over [0, inf) by Gauss-Legendre on a
  /// compactifying substitution; used for the construction-time check.
  [[nodiscard]] double integrate_beta() const;

 private:
  PenaltyFamily() = default;

  [[nodiscard]] double spline_beta(double s) const noexcept;
  [[nodiscard]] double spline_dbeta(double s) const noexcept;
  [[nodiscard]] double spline_B(double s) const noexcept;

  struct Spline {
    std::vector<double> s, a, b, c, d;  // a + b t + c t^2 + d t^3 on [s_k, s_{k+1}]
    std::vector<double> prefix;         // integral up to s_k
    [[nodiscard]] std::size_t segment(double x) const noexcept;
  };

  PenaltyShape shape_ = PenaltyShape::RationalCube;
  double mass_ = 0.5;
  double c_ = 1.0;
  Spline spline_;
};

}  // namespace fbp
