#pragma once

#include <cstddef>
#include <vector>

namespace fbp {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Ordinary least squares y ~ intercept + slope x. Throws
/// Error(InsufficientSamples) for fewer than `min_samples` points or a
/// constant x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_samples = 2);

/// v ~ C d^p by a log-log fit; pairs with a nonpositive entry are dropped
/// before counting.
struct PowerFit {
  double exponent = 0.0;
  double constant = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};
PowerFit power_law_fit(const std::vector<double>& d, const std::vector<double>& v, std::size_t min_samples = 3);

/// Least-squares a in u ~ a d^2 / 2 (no intercept).
double quadratic_coefficient(const std::vector<double>& d, const std::vector<double>& u);

}  // namespace fbp
