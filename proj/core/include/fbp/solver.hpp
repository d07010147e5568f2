#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fbp/grid.hpp"
#include "fbp/obstacle.hpp"
#include "fbp/penalty.hpp"

namespace fbp {

enum class SolveMethod { Psor, Parabolic };

struct SolveParams {
  SolveMethod method = SolveMethod::Psor;
  double omega = 1.95;
  /// Absolute sup-norm tolerance on the interior and complementarity
  /// residuals (PSOR) or on the time derivative (parabolic). Nonpositive
  /// means 1e-8 * max phi.
  double tol = 0.0;
  /// Sweeps (PSOR) or time steps (parabolic) per stage; 0 picks a
  /// method-dependent default.
  long max_iters = 0;
  double eps0 = 0.4;
  double gamma = 0.5;
  /// Last stage of the generated schedule; nonpositive means 4 hy.
  double eps_final = 0.0;
  /// Explicit schedule; overrides eps0 / gamma / eps_final when non-empty.
  std::vector<double> eps_schedule;
  int newton_inner = 3;
  double dt_safety = 0.9;
  /// Sweeps between energy diagnostics and residual-history samples.
  int diagnostics_every = 50;
  /// Progress lines `stage=<k> eps=<v> iter=<n> res_int=<v> res_comp=<v>`.
  std::ostream* progress = nullptr;
  /// Emit a progress line every this many iterations (0: stage ends only).
  long progress_every = 0;
};

struct ResidualSample {
  int stage = 0;
  long iter = 0;
  double res_int = 0.0;
  double res_comp = 0.0;
};

struct EnergySample {
  int stage = 0;
  long iter = 0;
  double descent = 0.0;  // functional whose stationarity is the discrete PDE
  double j_r = 0.0;      // same integrals without the 1/2 on the gradient terms
};

struct SolveResult {
  explicit SolveResult(Field f) : field(std::move(f)) {}

  Field field;
  double eps_final = 0.0;
  std::vector<double> eps_schedule;  // stages completed so far
  std::vector<ResidualSample> residual_history;
  std::vector<long> iterations;  // per stage
  std::vector<EnergySample> energy_history;
  long energy_increases = 0;  // diagnostic, not fatal
  bool converged = false;
  double res_int = 0.0;
  double res_comp = 0.0;
  double tol = 0.0;
  SolveMethod method = SolveMethod::Psor;
};

/// Resolved tolerance (params.tol or 1e-8 * max phi).
double effective_tol(const SolveParams& params, const ObstacleSpec& ob);

/// The continuation schedule eps_k = eps0 gamma^k, truncated at eps_final
/// (which is appended as the last stage). Throws Error(InvalidParams) when
/// any stage is below 2 hy or the parameters are out of range.
std::vector<double> make_schedule(const Grid& grid, const SolveParams& params);

/// Validates omega, tol, schedule; throws Error(InvalidParams).
void validate_params(const Grid& grid, const SolveParams& params);

/// phi^+(x) max(0, 1 + y/L), zero on Dirichlet faces; feasible.
Field initial_guess(const Grid& grid, const ObstacleSpec& ob);
/// phi^+ on the plane and 0 below (the Cauchy datum of the parabolic flow).
Field parabolic_initial_datum(const Grid& grid, const ObstacleSpec& ob);

/// Projected nonlinear Gauss-Seidel/SOR at a single eps. Interior nodes solve
/// D u - S + beta_eps(u) = 0 by bracketed Newton, plane nodes solve the
/// Wentzell row and are projected onto u >= phi. Returns the last iterate
/// with converged = false when max_iters is exhausted.
SolveResult psor_solve(const Grid& grid, const PenaltyFamily& fam, const ObstacleSpec& ob, const SolveParams& params,
                       Field init, double eps);

/// Explicit Euler on u_t = Delta u - beta_eps(u) (interior) and
/// u_t = Delta_x u - u_y (plane) with projection onto u >= phi after each step.
SolveResult parabolic_solve(const Grid& grid, const PenaltyFamily& fam, const ObstacleSpec& ob,
                            const SolveParams& params, Field init, double eps);

/// Warm-started eps continuation. Each element is the cumulative result after
/// the corresponding stage. Solver failures are rethrown with the failing
/// eps in the message; a stage that exhausts max_iters ends the sequence
/// with converged = false.
std::vector<SolveResult> continuation_solve(const Grid& grid, const PenaltyFamily& fam, const ObstacleSpec& ob,
                                            const SolveParams& params);

std::string to_string(SolveMethod m);

}  // namespace fbp
