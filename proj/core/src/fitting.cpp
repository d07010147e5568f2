#include "fbp/fitting.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/statistics/linear_regression.hpp>

#include "fbp/error.hpp"

namespace fbp {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t min_samples) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidParams, "fit samples differ in length");
  if (x.size() < std::max<std::size_t>(min_samples, 2)) {
    throw Error(ErrorCode::InsufficientSamples, "fit needs at least " + std::to_string(min_samples) + " samples, got " +
                                                    std::to_string(x.size()));
  }
  try {
    const auto [c0, c1, r2] = boost::math::statistics::simple_ordinary_least_squares_with_R_squared(x, y);
    return {c0, c1, r2, x.size()};
  } catch (const std::domain_error& e) {
    throw Error(ErrorCode::InsufficientSamples, e.what());
  }
}

PowerFit power_law_fit(const std::vector<double>& d, const std::vector<double>& v, std::size_t min_samples) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < d.size() && k < v.size(); ++k) {
    if (d[k] > 0.0 && v[k] > 0.0) {
      lx.push_back(std::log(d[k]));
      ly.push_back(std::log(v[k]));
    }
  }
  const LinearFit f = linear_fit(lx, ly, min_samples);
  return {f.slope, std::exp(f.intercept), f.r2, f.samples};
}

double quadratic_coefficient(const std::vector<double>& d, const std::vector<double>& u) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < d.size() && k < u.size(); ++k) {
    const double q = 0.5 * d[k] * d[k];
    num += u[k] * q;
    den += q * q;
  }
  if (!(den > 0.0)) throw Error(ErrorCode::InsufficientSamples, "quadratic fit has no samples");
  return num / den;
}

}  // namespace fbp
