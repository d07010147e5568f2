#include "fbp/penalty.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fbp/csv.hpp"
#include "fbp/error.hpp"

namespace fbp {

namespace {

// 20-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr std::array<double, 10> kGlX = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271, 0.6360536807265150,
    0.7463319064601508, 0.8391169718222188, 0.9122344282513259, 0.9639719272779138, 0.9931285991850949};
constexpr std::array<double, 10> kGlW = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766, 0.1181945319615184,
    0.1019301198172404, 0.0832767415767048, 0.0626720483341091, 0.0406014298003869, 0.0176140071391521};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double m = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGlX.size(); ++k) sum += kGlW[k] * (f(m - r * kGlX[k]) + f(m + r * kGlX[k]));
  return sum * r;
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonpositiveEps, "eps must be positive");
}

void check_arg(double s) {
  if (s < 0.0 || std::isnan(s)) throw Error(ErrorCode::NegativeArgument, "penalty argument must be >= 0");
}

}  // namespace

PenaltyFamily PenaltyFamily::rational_cube(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error(ErrorCode::InvalidPenalty, "mass must be positive");
  PenaltyFamily f;
  f.shape_ = PenaltyShape::RationalCube;
  f.mass_ = mass;
  f.c_ = 2.0 * mass;
  const double q = f.integrate_beta();
  if (std::abs(q - mass) > 1e-10 * std::max(1.0, mass)) {
    throw Error(ErrorCode::InvalidPenalty, "quadrature of beta does not reproduce the mass");
  }
  return f;
}

std::size_t PenaltyFamily::Spline::segment(double x) const noexcept {
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - s.begin()) - 1));
  return std::min(k, s.size() - 2);
}

PenaltyFamily PenaltyFamily::custom_table(std::vector<std::pair<double, double>> samples, double mass) {
  if (!(mass > 0.0)) throw Error(ErrorCode::InvalidPenalty, "mass must be positive");
  if (samples.size() < 3) throw Error(ErrorCode::InvalidPenalty, "table needs at least 3 samples");
  if (samples.front().first != 0.0 || samples.front().second != 0.0) {
    throw Error(ErrorCode::InvalidPenalty, "table must start at (0, 0)");
  }
  const std::size_t n = samples.size();
  for (std::size_t k = 1; k < n; ++k) {
    if (!(samples[k].first > samples[k - 1].first)) throw Error(ErrorCode::InvalidPenalty, "s must increase");
    if (k + 1 < n && !(samples[k].second > 0.0)) throw Error(ErrorCode::InvalidPenalty, "beta must be positive");
    if (samples[k].second < 0.0) throw Error(ErrorCode::InvalidPenalty, "beta must be nonnegative");
  }

  // natural cubic spline (second derivatives zero at both ends)
  Spline sp;
  std::vector<double> h(n - 1);
  sp.s.resize(n);
  sp.a.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    sp.s[k] = samples[k].first;
    sp.a[k] = samples[k].second;
  }
  for (std::size_t k = 0; k + 1 < n; ++k) h[k] = sp.s[k + 1] - sp.s[k];
  std::vector<double> m(n, 0.0);  // second derivatives
  {
    std::vector<double> diag(n, 1.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
      diag[k] = 2.0 * (h[k - 1] + h[k]);
      upper[k] = h[k];
      rhs[k] = 6.0 * ((sp.a[k + 1] - sp.a[k]) / h[k] - (sp.a[k] - sp.a[k - 1]) / h[k - 1]);
    }
    // Thomas algorithm with lower[k] = h[k-1]
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double lower = h[k - 1];
      const double w = (k == 1) ? 0.0 : lower / diag[k - 1];
      diag[k] -= w * upper[k - 1];
      rhs[k] -= w * rhs[k - 1];
    }
    for (std::size_t k = n - 2; k >= 1; --k) {
      m[k] = (rhs[k] - upper[k] * m[k + 1]) / diag[k];
      if (k == 1) break;
    }
  }
  sp.b.resize(n - 1);
  sp.c.resize(n - 1);
  sp.d.resize(n - 1);
  sp.prefix.assign(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    sp.b[k] = (sp.a[k + 1] - sp.a[k]) / h[k] - h[k] * (2.0 * m[k] + m[k + 1]) / 6.0;
    sp.c[k] = m[k] / 2.0;
    sp.d[k] = (m[k + 1] - m[k]) / (6.0 * h[k]);
    const double t = h[k];
    sp.prefix[k + 1] = sp.prefix[k] + sp.a[k] * t + sp.b[k] * t * t / 2 + sp.c[k] * t * t * t / 3 +
                       sp.d[k] * t * t * t * t / 4;
  }
  sp.a.resize(n - 1);
  const double raw_mass = sp.prefix.back();
  if (!(raw_mass > 0.0)) throw Error(ErrorCode::InvalidPenalty, "table has zero integral");

  PenaltyFamily f;
  f.shape_ = PenaltyShape::CustomTable;
  f.mass_ = mass;
  f.c_ = mass / raw_mass;
  f.spline_ = std::move(sp);
  return f;
}

PenaltyFamily PenaltyFamily::custom_table_file(const std::string& path, double mass) {
  return custom_table(read_two_column_csv(path), mass);
}

double PenaltyFamily::spline_beta(double s) const noexcept {
  if (s <= 0.0 || s >= spline_.s.back()) return 0.0;
  const std::size_t k = spline_.segment(s);
  const double t = s - spline_.s[k];
  return c_ * (spline_.a[k] + t * (spline_.b[k] + t * (spline_.c[k] + t * spline_.d[k])));
}

double PenaltyFamily::spline_dbeta(double s) const noexcept {
  if (s < 0.0 || s >= spline_.s.back()) return 0.0;
  const std::size_t k = spline_.segment(s);
  const double t = s - spline_.s[k];
  return c_ * (spline_.b[k] + t * (2.0 * spline_.c[k] + 3.0 * t * spline_.d[k]));
}

double PenaltyFamily::spline_B(double s) const noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= spline_.s.back()) return mass_;
  const std::size_t k = spline_.segment(s);
  const double t = s - spline_.s[k];
  const double seg = t * (spline_.a[k] + t * (spline_.b[k] / 2 + t * (spline_.c[k] / 3 + t * spline_.d[k] / 4)));
  return c_ * (spline_.prefix[k] + seg);
}

double PenaltyFamily::beta(double s) const {
  check_arg(s);
  return beta_raw(s);
}

double PenaltyFamily::beta_eps(double u, double eps) const {
  check_eps(eps);
  check_arg(u);
  return beta_raw(u / eps) / eps;
}

double PenaltyFamily::B(double s) const {
  check_arg(s);
  return B_raw(s);
}

double PenaltyFamily::B_eps(double u, double eps) const {
  check_eps(eps);
  check_arg(u);
  return B_raw(u / eps);
}

double PenaltyFamily::integrate_beta() const {
  if (shape_ == PenaltyShape::CustomTable) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < spline_.s.size(); ++k) {
      sum += gauss_legendre([this](double s) { return beta_raw(s); }, spline_.s[k], spline_.s[k + 1]);
    }
    return sum;
  }
  // s = t / (1 - t) maps [0,1) onto [0,inf); split [0,1] into panels
  // graded towards t = 1 where the integrand is concentrated.
  auto integrand = [this](double t) {
    const double one_minus = 1.0 - t;
    if (one_minus <= 0.0) return 0.0;
    const double s = t / one_minus;
    return beta_raw(s) / (one_minus * one_minus);
  };
  double sum = 0.0;
  constexpr int kPanels = 64;
  for (int k = 0; k < kPanels; ++k) {
    sum += gauss_legendre(integrand, static_cast<double>(k) / kPanels, static_cast<double>(k + 1) / kPanels);
  }
  return sum;
}

}  // namespace fbp
