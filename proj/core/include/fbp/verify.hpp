#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbp/fb_extract.hpp"
#include "fbp/obstacle.hpp"
#include "fbp/solver.hpp"

namespace fbp {

inline constexpr const char* kReportSchema = "fbp.report/1";

/// Pass thresholds. Every entry of the report records the values it used.
struct VerifyTolerances {
  double theta0 = 0.2;               // cone half-angle [rad]
  double cone_slack_factor = 10.0;   // slack = factor * tol / hx
  double support_min_factor = 10.0;  // min u(., 0) on |x| = 1 + rho0 must exceed factor * tol
  double uy_slack_factor = 10.0;     // u_y >= -factor * tol / hy counts as nonnegative
  double collar_factor = 2.0;        // collar width = factor * sqrt(eps)
  int bands = 3;                     // dyadic distance bands starting at the collar
  double band_tol = 0.1;             // sup |u_y - 1| in the first band, |limit - 1|
  double exponent_lo = 1.8;
  double exponent_hi = 2.2;
  double coef_lo = 0.85;             // normalised coefficient of d^2/2
  double coef_hi = 1.15;
  double d_max = 0.0;                // quadratic window end; <= 0: gap between supp phi^+ and the boundary
  double holder_lambda = 0.25;
  double holder_r2 = 0.9;
};

struct SupportGrowth {
  double rho0 = 0.0;
  double rho1 = 0.0;
  double delta1 = 0.0;  // min u(., 0) on |x| = 1 + rho0
  double delta_threshold = 0.0;
  bool pass = false;
};

struct ConeMonotonicity {
  double theta0 = 0.0;
  double slack = 0.0;
  int directions = 0;
  long pairs = 0;
  long violations = 0;
  double violation_fraction = 0.0;
  double max_derivative = 0.0;
  bool pass = false;
};

struct UyPositive {
  double delta_measured = 0.0;  // min u_y over Omega minus the collar
  double collar = 0.0;
  long samples = 0;
  double uy_min_plane = 0.0;    // min u_y over all free plane nodes
  double uy_slack = 0.0;
  bool uy_nonnegative = false;
  bool pass = false;
};

struct UyBand {
  double d_lo = 0.0;
  double d_hi = 0.0;
  long count = 0;
  double sup_dev = 0.0;   // sup |u_y - 1|
  double mean_dev = 0.0;  // mean |u_y - 1|
  double mean_uy = 0.0;
  double mean_d = 0.0;
};

struct UyLimit {
  std::vector<UyBand> bands;
  double band_tol = 0.0;
  double extrapolated_limit = 0.0;  // intercept of mean u_y against distance
  double decay_exponent = 0.0;      // power law of the band sups against distance
  bool first_band_ok = false;
  bool monotone = false;            // band sups nondecreasing away from the boundary
  bool limit_ok = false;
  bool pass = false;
};

struct QuadraticFit {
  double window_lo = 0.0;
  double window_hi = 0.0;
  long samples = 0;
  double exponent_u = 0.0;
  double constant_u = 0.0;
  double r2_u = 0.0;
  double exponent_psi = 0.0;
  double constant_psi = 0.0;
  double r2_psi = 0.0;
  double lambda_measured = 0.0;
  double coef_u = 0.0;    // u ~ coef_u d^2 / 2
  double coef_psi = 0.0;  // |psi| ~ coef_psi d^2 / 2
  double sqrt_coef_u = 0.0;    // slope^2 of sqrt(2u) against d (offset-free diagnostic)
  double sqrt_offset_u = 0.0;  // distance shift of that fit
  bool coefficients_checked = false;  // axisymmetric grids only
  bool upper_pass = false;            // exponent of u alone
  bool pass = false;
};

struct HolderFit {
  double alpha_sup = 0.0;
  double r2_sup = 0.0;
  long samples_sup = 0;
  double alpha_avg = 0.0;
  double r2_avg = 0.0;
  long samples_avg = 0;
  double lambda = 0.0;
  long clipped = 0;  // ball nodes dropped because they fell inside supp phi^+
  bool exact = false;  // |u_y - 1| vanishes identically
  bool pass = false;
};

/// A check either ran (value set) or failed with an error message.
template <class T>
struct Entry {
  std::optional<T> value;
  std::string error;
  [[nodiscard]] bool pass() const { return value.has_value() && value->pass; }
};

struct VerificationReport {
  VerifyTolerances tolerances;
  double eps = 0.0;
  double tol = 0.0;
  long graph_violations = 0;
  bool truncation_suspect = false;
  Entry<SupportGrowth> support_growth;
  Entry<ConeMonotonicity> cone_monotonicity;
  Entry<UyPositive> uy_positive;
  Entry<UyLimit> uy_limit;
  Entry<QuadraticFit> quadratic;
  Entry<HolderFit> holder;
  [[nodiscard]] bool all_pass() const;
};

SupportGrowth check_support_growth(const FreeBoundary& fb, const ObstacleSpec& ob, double tol,
                                   const VerifyTolerances& t = {});
ConeMonotonicity check_cone_monotonicity(const Field& f, const ObstacleSpec& ob, double tol,
                                         const VerifyTolerances& t = {});
/// Throws Error(EmptyBand) when the collar-trimmed Omega or a band is empty.
UyPositive check_uy_positive(const FreeBoundary& fb, double tol, const VerifyTolerances& t = {});
UyLimit check_uy_limit(const FreeBoundary& fb, const VerifyTolerances& t = {});
/// Throws Error(InsufficientSamples) when the window holds fewer than 3 nodes.
QuadraticFit fit_quadratic(const FreeBoundary& fb, const ObstacleSpec& ob, const VerifyTolerances& t = {});
HolderFit fit_holder(const FreeBoundary& fb, const ObstacleSpec& ob, const VerifyTolerances& t = {});

/// Runs every check; individual failures are recorded, not thrown.
VerificationReport verify_all(const SolveResult& res, const FreeBoundary& fb, const ObstacleSpec& ob,
                              const VerifyTolerances& t = {});

nlohmann::json to_json(const VerificationReport& r);

}  // namespace fbp
