#include "fbp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fbp/error.hpp"
#include "fbp/fitting.hpp"
#include "fbp/operators.hpp"

namespace fbp {

namespace {

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::vector<double> boundary_distances(const FreeBoundary& fb) {
  std::vector<double> d(fb.grid.plane_size(), std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < d.size(); ++p) {
    if (fb.omega_mask[p] != 0) d[p] = distance_to_boundary(fb, fb.grid.plane_point(p));
  }
  return d;
}

std::vector<std::uint8_t> free_nodes(const Grid& g) {
  const PlaneLaplacian lap(g);
  std::vector<std::uint8_t> out(g.plane_size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = lap.row(p).fixed ? 0 : 1;
  return out;
}

// Width of the annulus between supp phi^+ and the nearest boundary point.
double support_gap(const FreeBoundary& fb, const ObstacleSpec& ob) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& b : fb.boundary_points) gap = std::min(gap, ob.distance_from_center(b) - ob.support_radius());
  return gap;
}

double collar_width(const FreeBoundary& fb, const VerifyTolerances& t) { return t.collar_factor * std::sqrt(fb.eps); }

template <class T, class F>
Entry<T> run(F&& f) {
  Entry<T> e;
  try {
    e.value = f();
  } catch (const Error& err) {
    e.error = err.what();
  }
  return e;
}

}  // namespace

bool VerificationReport::all_pass() const {
  return support_growth.pass() && cone_monotonicity.pass() && uy_positive.pass() && uy_limit.pass() &&
         quadratic.pass() && holder.pass();
}

SupportGrowth check_support_growth(const FreeBoundary& fb, const ObstacleSpec& ob, double tol,
                                   const VerifyTolerances& t) {
  const Grid& g = fb.grid;
  SupportGrowth s;
  s.rho0 = ob.rho0();
  s.delta_threshold = t.support_min_factor * tol;
  const double rad = ob.support_radius();
  const PlanePoint c = ob.center();

  std::vector<PlanePoint> sphere;
  if (g.axisymmetric()) {
    sphere.push_back({rad, 0.0});
  } else if (g.plane_axes() == 1) {
    sphere.push_back({c[0] - rad, 0.0});
    sphere.push_back({c[0] + rad, 0.0});
  } else {
    constexpr int kAngles = 720;
    for (int k = 0; k < kAngles; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kAngles;
      sphere.push_back({c[0] + rad * std::cos(a), c[1] + rad * std::sin(a)});
    }
  }
  s.delta1 = std::numeric_limits<double>::infinity();
  for (const auto& x : sphere) s.delta1 = std::min(s.delta1, interpolate_plane(g, fb.u0, x));

  if (fb.boundary_points.empty()) {
    // Omega fills the box: only the box bounds the support
    s.rho1 = (g.axisymmetric() ? g.half_width() : g.half_width() - std::abs(c[0])) - 1.0;
  } else {
    double rmin = std::numeric_limits<double>::infinity();
    for (const auto& b : fb.boundary_points) rmin = std::min(rmin, ob.distance_from_center(b));
    s.rho1 = rmin - 1.0;
  }
  s.pass = s.delta1 > s.delta_threshold && s.rho1 > s.rho0;
  return s;
}

ConeMonotonicity check_cone_monotonicity(const Field& f, const ObstacleSpec& ob, double tol,
                                         const VerifyTolerances& t) {
  const Grid& g = f.grid();
  ConeMonotonicity c;
  c.theta0 = t.theta0;
  c.slack = t.cone_slack_factor * tol / g.hx();
  const auto d1 = directional_derivative_plane(f, {1.0, 0.0});
  const auto d2 = g.plane_axes() == 2 ? directional_derivative_plane(f, {0.0, 1.0}) : std::vector<double>();
  const auto free = free_nodes(g);

  std::vector<double> angles = {0.0};
  if (g.plane_axes() == 2 && t.theta0 > 0.0) angles = {-t.theta0, -0.5 * t.theta0, 0.0, 0.5 * t.theta0, t.theta0};
  c.directions = static_cast<int>(angles.size());
  c.max_derivative = -std::numeric_limits<double>::infinity();

  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    if (free[p] == 0) continue;
    const PlanePoint x = g.plane_point(p);
    const double r = ob.distance_from_center(x);
    if (!(r > ob.support_radius())) continue;
    PlanePoint n{1.0, 0.0};
    if (!g.axisymmetric()) n = {(x[0] - ob.center()[0]) / r, g.plane_axes() == 2 ? (x[1] - ob.center()[1]) / r : 0.0};
    for (double a : angles) {
      const double e0 = std::cos(a) * n[0] - std::sin(a) * n[1];
      const double e1 = std::sin(a) * n[0] + std::cos(a) * n[1];
      const double de = e0 * d1[p] + (d2.empty() ? 0.0 : e1 * d2[p]);
      ++c.pairs;
      c.max_derivative = std::max(c.max_derivative, de);
      if (de > c.slack) ++c.violations;
    }
  }
  c.violation_fraction = c.pairs > 0 ? static_cast<double>(c.violations) / static_cast<double>(c.pairs) : 0.0;
  c.pass = c.pairs > 0 && c.violations == 0;
  return c;
}

UyPositive check_uy_positive(const FreeBoundary& fb, double tol, const VerifyTolerances& t) {
  const Grid& g = fb.grid;
  UyPositive u;
  u.collar = collar_width(fb, t);
  u.uy_slack = t.uy_slack_factor * tol / g.hy();
  const auto d = boundary_distances(fb);
  const auto free = free_nodes(g);
  u.delta_measured = std::numeric_limits<double>::infinity();
  u.uy_min_plane = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    if (free[p] == 0) continue;
    u.uy_min_plane = std::min(u.uy_min_plane, fb.uy[p]);
    if (fb.omega_mask[p] != 0 && d[p] >= u.collar) {
      u.delta_measured = std::min(u.delta_measured, fb.uy[p]);
      ++u.samples;
    }
  }
  if (u.samples == 0) throw Error(ErrorCode::EmptyBand, "Omega minus the collar is empty");
  u.uy_nonnegative = u.uy_min_plane >= -u.uy_slack;
  u.pass = u.delta_measured > 0.0 && u.uy_nonnegative;
  return u;
}

UyLimit check_uy_limit(const FreeBoundary& fb, const VerifyTolerances& t) {
  const Grid& g = fb.grid;
  UyLimit L;
  L.band_tol = t.band_tol;
  const auto d = boundary_distances(fb);
  const double c0 = collar_width(fb, t);
  for (int k = 0; k < t.bands; ++k) {
    UyBand b;
    b.d_lo = c0 * std::ldexp(1.0, k);
    b.d_hi = 2.0 * b.d_lo;
    double sum_dev = 0.0;
    double sum_uy = 0.0;
    double sum_d = 0.0;
    for (std::size_t p = 0; p < g.plane_size(); ++p) {
      if (fb.omega_mask[p] == 0 || d[p] < b.d_lo || d[p] >= b.d_hi) continue;
      const double dev = std::abs(fb.uy[p] - 1.0);
      ++b.count;
      b.sup_dev = std::max(b.sup_dev, dev);
      sum_dev += dev;
      sum_uy += fb.uy[p];
      sum_d += d[p];
    }
    if (b.count == 0) {
      throw Error(ErrorCode::EmptyBand, "distance band [" + std::to_string(b.d_lo) + ", " + std::to_string(b.d_hi) +
                                            ") holds no node of Omega");
    }
    b.mean_dev = sum_dev / static_cast<double>(b.count);
    b.mean_uy = sum_uy / static_cast<double>(b.count);
    b.mean_d = sum_d / static_cast<double>(b.count);
    L.bands.push_back(b);
  }
  std::vector<double> ds;
  std::vector<double> mu;
  std::vector<double> sups;
  for (const auto& b : L.bands) {
    ds.push_back(b.mean_d);
    mu.push_back(b.mean_uy);
    sups.push_back(b.sup_dev);
  }
  L.extrapolated_limit = ds.size() >= 2 ? linear_fit(ds, mu).intercept : mu.front();
  try {
    L.decay_exponent = power_law_fit(ds, sups, 2).exponent;
  } catch (const Error&) {
    L.decay_exponent = nan();  // all sups vanish
  }
  L.first_band_ok = L.bands.front().sup_dev <= t.band_tol;
  L.monotone = true;
  for (std::size_t k = 1; k < L.bands.size(); ++k) L.monotone = L.monotone && L.bands[k - 1].sup_dev <= L.bands[k].sup_dev;
  L.limit_ok = std::abs(L.extrapolated_limit - 1.0) <= t.band_tol;
  L.pass = L.first_band_ok && L.monotone && L.limit_ok;
  return L;
}

QuadraticFit fit_quadratic(const FreeBoundary& fb, const ObstacleSpec& ob, const VerifyTolerances& t) {
  const Grid& g = fb.grid;
  if (fb.boundary_points.empty()) throw Error(ErrorCode::InsufficientSamples, "no boundary to fit against");
  QuadraticFit q;
  q.window_lo = collar_width(fb, t);
  q.window_hi = t.d_max > 0.0 ? t.d_max : support_gap(fb, ob);
  const auto d = boundary_distances(fb);
  std::vector<double> dd;
  std::vector<double> uu;
  std::vector<double> pp;
  std::vector<double> su;
  q.lambda_measured = 0.0;
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    if (fb.omega_mask[p] == 0 || fb.coincidence_mask[p] != 0) continue;
    if (d[p] < q.window_lo || d[p] > q.window_hi) continue;
    if (ob.distance_from_center(g.plane_point(p)) <= ob.support_radius()) continue;
    if (std::isnan(fb.psi[p])) continue;
    dd.push_back(d[p]);
    uu.push_back(fb.u0[p]);
    pp.push_back(std::abs(fb.psi[p]));
    su.push_back(std::sqrt(2.0 * std::max(fb.u0[p], 0.0)));
    const double d2 = d[p] * d[p];
    const double ps = std::abs(fb.psi[p]);
    if (ps > 0.0) q.lambda_measured = std::max({q.lambda_measured, ps / d2, d2 / ps});
  }
  q.samples = static_cast<long>(dd.size());
  if (dd.size() < 3) {
    throw Error(ErrorCode::InsufficientSamples, "quadratic window [" + std::to_string(q.window_lo) + ", " +
                                                    std::to_string(q.window_hi) + "] holds " +
                                                    std::to_string(dd.size()) + " nodes");
  }
  const PowerFit fu = power_law_fit(dd, uu);
  const PowerFit fp = power_law_fit(dd, pp);
  q.exponent_u = fu.exponent;
  q.constant_u = fu.constant;
  q.r2_u = fu.r2;
  q.exponent_psi = fp.exponent;
  q.constant_psi = fp.constant;
  q.r2_psi = fp.r2;
  q.coef_u = quadratic_coefficient(dd, uu);
  q.coef_psi = quadratic_coefficient(dd, pp);
  const LinearFit sf = linear_fit(dd, su);
  q.sqrt_coef_u = sf.slope * sf.slope;
  q.sqrt_offset_u = sf.slope != 0.0 ? sf.intercept / sf.slope : nan();

  auto in = [&](double v, double lo, double hi) { return v >= lo && v <= hi; };
  q.upper_pass = in(q.exponent_u, t.exponent_lo, t.exponent_hi);
  q.pass = q.upper_pass && in(q.exponent_psi, t.exponent_lo, t.exponent_hi);
  q.coefficients_checked = g.axisymmetric();
  if (q.coefficients_checked) q.pass = q.pass && in(q.coef_u, t.coef_lo, t.coef_hi) && in(q.coef_psi, t.coef_lo, t.coef_hi);
  return q;
}

HolderFit fit_holder(const FreeBoundary& fb, const ObstacleSpec& ob, const VerifyTolerances& t) {
  const Grid& g = fb.grid;
  HolderFit h;
  h.lambda = t.holder_lambda;
  const auto d = boundary_distances(fb);
  const double c0 = collar_width(fb, t);
  double dmax = 0.0;
  bool all_zero = true;
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    if (fb.omega_mask[p] == 0 || !std::isfinite(d[p])) continue;
    dmax = std::max(dmax, d[p]);
    if (fb.uy[p] != 1.0) all_zero = false;
  }
  if (all_zero) {
    h.exact = true;
    h.pass = true;
    return h;
  }

  // sup (u_y - 1)^+ over dyadic distance bands
  std::vector<double> bd;
  std::vector<double> bs;
  for (double lo = c0; lo < dmax; lo *= 2.0) {
    double sup = 0.0;
    double sum_d = 0.0;
    long n = 0;
    for (std::size_t p = 0; p < g.plane_size(); ++p) {
      if (fb.omega_mask[p] == 0 || d[p] < lo || d[p] >= 2.0 * lo) continue;
      sup = std::max(sup, fb.uy[p] - 1.0);
      sum_d += d[p];
      ++n;
    }
    if (n == 0) continue;
    bd.push_back(sum_d / static_cast<double>(n));
    bs.push_back(sup);
  }
  const PowerFit fs = power_law_fit(bd, bs);
  h.alpha_sup = fs.exponent;
  h.r2_sup = fs.r2;
  h.samples_sup = static_cast<long>(fs.samples);

  // ball averages of |u_y - 1| over B_{lambda h}(x) for x at distance h
  const double weight_power = g.axisymmetric() ? g.plane_dim() - 1 : 0;
  std::vector<double> hs;
  std::vector<double> avg;
  for (double hh = c0; hh <= dmax; hh *= std::sqrt(2.0)) {
    double total = 0.0;
    long centres = 0;
    for (std::size_t p = 0; p < g.plane_size(); ++p) {
      if (fb.omega_mask[p] == 0 || std::abs(d[p] - hh) > 0.5 * g.hx()) continue;
      const PlanePoint x = g.plane_point(p);
      const double rad = h.lambda * hh;
      double num = 0.0;
      double den = 0.0;
      for (std::size_t q = 0; q < g.plane_size(); ++q) {
        const PlanePoint y = g.plane_point(q);
        if (std::hypot(y[0] - x[0], y[1] - x[1]) > rad) continue;
        if (ob.distance_from_center(y) <= ob.support_radius()) {
          ++h.clipped;
          continue;
        }
        const double w = weight_power > 0 ? std::pow(std::abs(y[0]), weight_power) : 1.0;
        num += w * std::abs(fb.uy[q] - 1.0);
        den += w;
      }
      if (den > 0.0) {
        total += num / den;
        ++centres;
      }
    }
    if (centres == 0) continue;
    hs.push_back(hh);
    avg.push_back(total / static_cast<double>(centres));
  }
  const PowerFit fa = power_law_fit(hs, avg);
  h.alpha_avg = fa.exponent;
  h.r2_avg = fa.r2;
  h.samples_avg = static_cast<long>(fa.samples);
  h.pass = h.alpha_sup > 0.0 && h.r2_sup >= t.holder_r2 && h.alpha_avg > 0.0 && h.r2_avg >= t.holder_r2;
  return h;
}

VerificationReport verify_all(const SolveResult& res, const FreeBoundary& fb, const ObstacleSpec& ob,
                              const VerifyTolerances& t) {
  VerificationReport r;
  r.tolerances = t;
  r.eps = res.eps_final;
  r.tol = res.tol;
  r.graph_violations = fb.graph_violations;
  r.truncation_suspect = fb.truncation_suspect;
  r.support_growth = run<SupportGrowth>([&] { return check_support_growth(fb, ob, res.tol, t); });
  r.cone_monotonicity = run<ConeMonotonicity>([&] { return check_cone_monotonicity(res.field, ob, res.tol, t); });
  r.uy_positive = run<UyPositive>([&] { return check_uy_positive(fb, res.tol, t); });
  r.uy_limit = run<UyLimit>([&] { return check_uy_limit(fb, t); });
  r.quadratic = run<QuadraticFit>([&] { return fit_quadratic(fb, ob, t); });
  r.holder = run<HolderFit>([&] { return fit_holder(fb, ob, t); });
  return r;
}

namespace {

// JSON has no NaN or infinity; such values are written as null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

template <class T, class F>
nlohmann::json entry_json(const Entry<T>& e, F&& body) {
  nlohmann::json j;
  if (e.value) {
    j = body(*e.value);
    j["pass"] = e.value->pass;
  } else {
    j["pass"] = false;
    j["error"] = e.error;
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const VerificationReport& r) {
  const VerifyTolerances& t = r.tolerances;
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["eps"] = num(r.eps);
  j["tol"] = num(r.tol);
  j["graph_violations"] = r.graph_violations;
  j["truncation_suspect"] = r.truncation_suspect;
  j["support_growth"] = entry_json(r.support_growth, [&](const SupportGrowth& s) {
    return nlohmann::json{{"rho0", num(s.rho0)},
                          {"rho1_measured", num(s.rho1)},
                          {"delta1", num(s.delta1)},
                          {"tolerance", {{"delta1_min", num(s.delta_threshold)}}}};
  });
  j["cone_monotonicity"] = entry_json(r.cone_monotonicity, [&](const ConeMonotonicity& c) {
    return nlohmann::json{{"theta0_used", num(c.theta0)},
                          {"directions", c.directions},
                          {"pairs", c.pairs},
                          {"violations", c.violations},
                          {"violation_fraction", num(c.violation_fraction)},
                          {"max_derivative", num(c.max_derivative)},
                          {"tolerance", {{"slack", num(c.slack)}, {"violation_fraction_max", 0.0}}}};
  });
  j["uy_positive"] = entry_json(r.uy_positive, [&](const UyPositive& u) {
    return nlohmann::json{{"delta_measured", num(u.delta_measured)},
                          {"collar", num(u.collar)},
                          {"samples", u.samples},
                          {"uy_min_plane", num(u.uy_min_plane)},
                          {"uy_nonnegative", u.uy_nonnegative},
                          {"tolerance", {{"delta_min", 0.0}, {"uy_slack", num(u.uy_slack)}}}};
  });
  j["uy_limit"] = entry_json(r.uy_limit, [&](const UyLimit& L) {
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& b : L.bands) {
      bands.push_back({{"d_lo", num(b.d_lo)},
                       {"d_hi", num(b.d_hi)},
                       {"count", b.count},
                       {"sup_dev", num(b.sup_dev)},
                       {"mean_dev", num(b.mean_dev)},
                       {"mean_uy", num(b.mean_uy)},
                       {"mean_d", num(b.mean_d)}});
    }
    return nlohmann::json{{"bands", bands},
                          {"extrapolated_limit", num(L.extrapolated_limit)},
                          {"decay_exponent", num(L.decay_exponent)},
                          {"first_band_ok", L.first_band_ok},
                          {"monotone", L.monotone},
                          {"limit_ok", L.limit_ok},
                          {"tolerance", {{"band_tol", num(L.band_tol)}}}};
  });
  const nlohmann::json exponent_tol = {{"exponent", {num(t.exponent_lo), num(t.exponent_hi)}}};
  if (r.quadratic.value) {
    const QuadraticFit& q = *r.quadratic.value;
    j["quad_upper"] = {{"window", {num(q.window_lo), num(q.window_hi)}},
                       {"samples", q.samples},
                       {"exponent", num(q.exponent_u)},
                       {"constant", num(q.constant_u)},
                       {"r2", num(q.r2_u)},
                       {"pass", q.upper_pass},
                       {"tolerance", exponent_tol}};
    j["quad_lower_and_psi"] = {{"window", {num(q.window_lo), num(q.window_hi)}},
                               {"samples", q.samples},
                               {"exponent_u", num(q.exponent_u)},
                               {"exponent_psi", num(q.exponent_psi)},
                               {"constant_psi", num(q.constant_psi)},
                               {"r2_psi", num(q.r2_psi)},
                               {"lambda_measured", num(q.lambda_measured)},
                               {"coef_u", num(q.coef_u)},
                               {"coef_psi", num(q.coef_psi)},
                               {"sqrt_coef_u", num(q.sqrt_coef_u)},
                               {"sqrt_offset_u", num(q.sqrt_offset_u)},
                               {"coefficients_checked", q.coefficients_checked},
                               {"pass", q.pass},
                               {"tolerance",
                                {{"exponent", {num(t.exponent_lo), num(t.exponent_hi)}},
                                 {"coefficient", {num(t.coef_lo), num(t.coef_hi)}}}}};
  } else {
    j["quad_upper"] = {{"pass", false}, {"error", r.quadratic.error}};
    j["quad_lower_and_psi"] = {{"pass", false}, {"error", r.quadratic.error}};
  }
  j["holder"] = entry_json(r.holder, [&](const HolderFit& h) {
    return nlohmann::json{{"alpha_sup", num(h.alpha_sup)},
                          {"r2_sup", num(h.r2_sup)},
                          {"samples_sup", h.samples_sup},
                          {"alpha_avg", num(h.alpha_avg)},
                          {"r2_avg", num(h.r2_avg)},
                          {"samples_avg", h.samples_avg},
                          {"lambda", num(h.lambda)},
                          {"clipped", h.clipped},
                          {"exact", h.exact},
                          {"tolerance", {{"alpha_min", 0.0}, {"r2_min", num(t.holder_r2)}}}};
  });
  j["all_pass"] = r.all_pass();
  return j;
}

}  // namespace fbp
