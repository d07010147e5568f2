#include "fbp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>

// Boost 1.74's pchip calls an unqualified isnan
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "fbp/csv.hpp"
#include "fbp/error.hpp"

namespace fbp {

namespace {

constexpr double kQuadTol = 1e-10;

void check_M(double M) {
  if (!(M > 0.0) || !std::isfinite(M)) throw Error(ErrorCode::InvalidParams, "M must be positive");
}

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::NonpositiveEps, "eps must be positive");
}

// int_{t}^{ln M} e^s / sqrt(2 B_eps(e^s)) ds, the depth at which u = e^t.
// In log variables the integrand tends to a constant as v -> 0, so the
// logarithmic singularity of the original integral disappears.
double log_depth(const PenaltyFamily& fam, double M, double eps, double t) {
  const double top = std::log(M);
  if (t >= top) return 0.0;
  auto f = [&](double s) {
    const double v = std::exp(s);
    const double b = fam.B_raw(v / eps);
    if (!(b > 0.0)) return std::numeric_limits<double>::infinity();
    return v / std::sqrt(2.0 * b);
  };
  double err = 0.0;
  const double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, t, top, 20, kQuadTol, &err);
  if (!std::isfinite(val) || err > kQuadTol * std::max(std::abs(val), 1e-300) * 10.0) {
    throw Error(ErrorCode::QuadratureFailure, "adaptive quadrature missed its tolerance at u = " +
                                                  format_double(std::exp(t)));
  }
  return val;
}

}  // namespace

double slab_exact(double M, double y) {
  check_M(M);
  return std::max(0.0, y + M);
}

double ode1d_depth(const PenaltyFamily& fam, double M, double eps, double u) {
  check_M(M);
  check_eps(eps);
  if (!(u > 0.0) || u > M) throw Error(ErrorCode::InvalidParams, "profile value must lie in (0, M]");
  return -log_depth(fam, M, eps, std::log(u));
}

OracleProfile ode1d_penalized(const PenaltyFamily& fam, double M, double eps, std::span<const double> y_samples) {
  check_M(M);
  check_eps(eps);
  OracleProfile prof;
  prof.M = M;
  prof.eps = eps;
  prof.slope_at_plane = std::sqrt(2.0 * fam.B_raw(M / eps));
  prof.y.assign(y_samples.begin(), y_samples.end());
  prof.u.resize(prof.y.size());

  const double top = std::log(M);
  for (std::size_t k = 0; k < prof.y.size(); ++k) {
    const double y = prof.y[k];
    if (!(y <= 0.0)) throw Error(ErrorCode::InvalidParams, "profile samples must satisfy y <= 0");
    if (y == 0.0) {
      prof.u[k] = M;
      continue;
    }
    const double target = -y;
    auto g = [&](double t) { return log_depth(fam, M, eps, t) - target; };
    // bracket [lo, top] with g(lo) >= 0 > g(top)
    double width = 1.0;
    double lo = top - width;
    while (g(lo) < 0.0) {
      width *= 2.0;
      lo = top - width;
      if (width > 4096.0) throw Error(ErrorCode::QuadratureFailure, "could not bracket the profile value");
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(g, lo, top, g(lo), -target,
                                                     boost::math::tools::eps_tolerance<double>(50), iters);
    prof.u[k] = std::exp(0.5 * (r.first + r.second));
  }
  return prof;
}

double OracleProfile::value(double yq) const {
  if (y.empty()) throw Error(ErrorCode::InvalidParams, "empty profile");
  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  std::vector<double> xs;
  std::vector<double> vs;
  for (std::size_t k : order) {
    if (!xs.empty() && y[k] == xs.back()) continue;
    xs.push_back(y[k]);
    vs.push_back(u[k]);
  }
  if (yq <= xs.front()) return vs.front();
  if (yq >= xs.back()) return vs.back();
  if (xs.size() < 4) {
    const auto it = std::upper_bound(xs.begin(), xs.end(), yq);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double a = (yq - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return (1.0 - a) * vs[i - 1] + a * vs[i];
  }
  const boost::math::interpolators::pchip<std::vector<double>> interp(std::move(xs), std::move(vs));
  return interp(yq);
}

void write_profile_csv(std::ostream& out, const OracleProfile& profile) {
  out << "y,u\n";
  for (std::size_t k = 0; k < profile.y.size(); ++k) write_csv_row(out, {profile.y[k], profile.u[k]});
}

std::vector<double> brute_obstacle_1d(std::span<const double> g, std::pair<double, double> dirichlet, double h) {
  const std::size_t n = g.size();
  if (n == 0) return {};
  if (n > 20) throw Error(ErrorCode::InvalidParams, "brute-force enumeration needs n <= 20");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidParams, "spacing must be positive");
  const double ih2 = 1.0 / (h * h);
  double scale = 1.0 + std::abs(dirichlet.first) + std::abs(dirichlet.second);
  for (double v : g) scale += std::abs(v) * h * h;
  const double wtol = 1e-12 * scale;

  std::vector<double> w(n), diag(n), rhs(n), upper(n), lower(n);
  auto value = [&](std::ptrdiff_t k) {
    if (k < 0) return dirichlet.first;
    if (k >= static_cast<std::ptrdiff_t>(n)) return dirichlet.second;
    return w[static_cast<std::size_t>(k)];
  };

  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    // tridiagonal system: active rows w_k = 0, free rows -w'' + g = 0
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) {
        diag[k] = 1.0;
        lower[k] = upper[k] = 0.0;
        rhs[k] = 0.0;
        continue;
      }
      diag[k] = 2.0;
      lower[k] = k > 0 ? -1.0 : 0.0;
      upper[k] = k + 1 < n ? -1.0 : 0.0;
      rhs[k] = -g[k] * h * h;
      if (k == 0) rhs[k] += dirichlet.first;
      if (k + 1 == n) rhs[k] += dirichlet.second;
    }
    for (std::size_t k = 1; k < n; ++k) {
      const double m = lower[k] / diag[k - 1];
      diag[k] -= m * upper[k - 1];
      rhs[k] -= m * rhs[k - 1];
    }
    w[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) w[k] = (rhs[k] - upper[k] * w[k + 1]) / diag[k];

    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      const auto kk = static_cast<std::ptrdiff_t>(k);
      if (mask & (1u << k)) {
        const double r = -(value(kk - 1) - 2.0 * w[k] + value(kk + 1)) * ih2 + g[k];
        ok = r >= -wtol * ih2;
      } else {
        ok = w[k] >= -wtol;
      }
    }
    if (ok) {
      for (double& v : w) v = std::max(v, 0.0);
      return w;
    }
  }
  throw Error(ErrorCode::NoFeasibleActiveSet, "no complementary active set");
}

}  // namespace fbp
