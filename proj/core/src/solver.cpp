#include "fbp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "fbp/csv.hpp"
#include "fbp/error.hpp"
#include "fbp/operators.hpp"

namespace fbp {

std::string to_string(SolveMethod m) { return m == SolveMethod::Psor ? "PSOR" : "PARABOLIC"; }

double effective_tol(const SolveParams& params, const ObstacleSpec& ob) {
  return params.tol > 0.0 ? params.tol : 1e-8 * std::max(1e-300, ob.max_value());
}

std::vector<double> make_schedule(const Grid& grid, const SolveParams& params) {
  std::vector<double> eps;
  if (!params.eps_schedule.empty()) {
    eps = params.eps_schedule;
  } else {
    const double last = params.eps_final > 0.0 ? params.eps_final : 4.0 * grid.hy();
    if (!(params.eps0 > 0.0) || !(params.gamma > 0.0 && params.gamma < 1.0)) {
      throw Error(ErrorCode::InvalidParams, "need eps0 > 0 and 0 < gamma < 1");
    }
    double e = params.eps0;
    while (e > last * (1.0 + 1e-12)) {
      eps.push_back(e);
      e *= params.gamma;
    }
    eps.push_back(last);
  }
  for (double e : eps) {
    if (!(e > 0.0)) throw Error(ErrorCode::InvalidParams, "eps must be positive");
    if (e < 2.0 * grid.hy() * (1.0 - 1e-12)) {
      throw Error(ErrorCode::InvalidParams,
                  "eps = " + format_double(e) + " is below the resolvability guard 2 hy = " + format_double(2.0 * grid.hy()));
    }
  }
  return eps;
}

void validate_params(const Grid& grid, const SolveParams& params) {
  if (!(params.omega > 0.0 && params.omega < 2.0)) throw Error(ErrorCode::InvalidParams, "omega must lie in (0, 2)");
  if (params.tol < 0.0 || std::isnan(params.tol)) throw Error(ErrorCode::InvalidParams, "tol must be positive");
  if (params.newton_inner < 1) throw Error(ErrorCode::InvalidParams, "newton_inner must be >= 1");
  if (!(params.dt_safety > 0.0 && params.dt_safety <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "dt_safety must lie in (0, 1]");
  }
  if (params.max_iters < 0) throw Error(ErrorCode::InvalidParams, "max_iters must be >= 0");
  if (grid.ny() < 3) throw Error(ErrorCode::GridTooShallow, "solver needs ny >= 3");
  (void)make_schedule(grid, params);
}

Field initial_guess(const Grid& grid, const ObstacleSpec& ob) {
  const PlaneLaplacian lap(grid);
  Field f(grid);
  for (int j = 0; j < grid.ny(); ++j) {
    const double depth_factor = std::max(0.0, 1.0 + grid.y(j) / grid.depth());
    for (std::size_t p = 0; p < grid.plane_size(); ++p) {
      if (lap.row(p).fixed || j == 0) continue;
      f.at(p, j) = std::max(0.0, ob.phi(grid.plane_point(p))) * depth_factor;
    }
  }
  return f;
}

Field parabolic_initial_datum(const Grid& grid, const ObstacleSpec& ob) {
  const PlaneLaplacian lap(grid);
  Field f(grid);
  for (std::size_t p = 0; p < grid.plane_size(); ++p) {
    if (lap.row(p).fixed) continue;
    f.at(p, grid.top()) = std::max(0.0, ob.phi(grid.plane_point(p)));
  }
  return f;
}

namespace {

struct Problem {
  const Grid& grid;
  const PenaltyFamily& fam;
  PlaneLaplacian lap;
  std::vector<double> phi;
  double eps;
  double inv_eps;
  double iy2;

  Problem(const Grid& g, const PenaltyFamily& f, const ObstacleSpec& ob, double e)
      : grid(g), fam(f), lap(g), phi(ob.sample(g)), eps(e), inv_eps(1.0 / e), iy2(1.0 / (g.hy() * g.hy())) {}

  [[nodiscard]] double beta(double u) const noexcept { return fam.beta_raw(u * inv_eps) * inv_eps; }
};

// Neighbour sum S of the interior row D u - S + beta(u) = 0 at flat index k.
inline double interior_sum(const PlaneRow& row, const double* layer, const double* up, const double* down,
                           std::size_t p, double iy2) noexcept {
  double s = (up[p] + down[p]) * iy2;
  for (int q = 0; q < row.count; ++q) s += row.w[q] * layer[row.nb[q]];
  return s;
}

// Root of D v - S + beta_eps(v) = 0. D + beta_eps' > 0 holds whenever
// eps >= 2 hy, so the root is unique and bracketed by [0, S/D]. `F` is the
// residual at `v`, which must lie in the bracket.
double node_root(const Problem& pb, double D, double S, double v, double F, int inner) {
  if (S <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = S / D;
  for (int it = 0; it < inner; ++it) {
    if (!std::isfinite(F)) throw Error(ErrorCode::NodeNewtonDiverged, "non-finite node residual");
    if (F > 0.0) {
      hi = v;
    } else if (F < 0.0) {
      lo = v;
    } else {
      return v;
    }
    const double s = v * pb.inv_eps;
    const double dF = D + pb.fam.dbeta_raw(s) * pb.inv_eps * pb.inv_eps;
    double next = v - F / dF;
    // quadratic convergence: a step this small leaves an error far below it
    if (std::abs(next - v) <= 1e-9 * (std::abs(v) + pb.eps) && next >= lo && next <= hi) return next;
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    v = next;
    if (it + 1 < inner) F = D * v - S + pb.beta(v);
  }
  return v;
}

void log_line(const SolveParams& params, int stage, double eps, long iter, double ri, double rc) {
  if (params.progress == nullptr) return;
  *params.progress << "stage=" << stage << " eps=" << format_double(eps) << " iter=" << iter
                   << " res_int=" << format_double(ri) << " res_comp=" << format_double(rc) << '\n';
}

void project_plane(Field& f, const Problem& pb) {
  auto plane = f.plane_view();
  for (std::size_t p = 0; p < plane.size(); ++p) {
    if (pb.lap.row(p).fixed) continue;
    plane[p] = std::max(plane[p], pb.phi[p]);
  }
}

void record_energy(SolveResult& r, const Problem& pb, int stage, long iter, double tol) {
  const EnergyValues e = energy(r.field, pb.fam, pb.eps);
  if (!r.energy_history.empty() && r.energy_history.back().stage == stage) {
    const double prev = r.energy_history.back().descent;
    if (e.descent > prev + std::max(tol, 1e-12 * std::abs(prev))) ++r.energy_increases;
  }
  r.energy_history.push_back({stage, iter, e.descent, e.j_r});
}

long default_max_iters(SolveMethod m) { return m == SolveMethod::Psor ? 400000 : 20000000; }

SolveResult start_result(Field init, double eps, const SolveParams& params, const ObstacleSpec& ob) {
  SolveResult r(std::move(init));
  r.eps_final = eps;
  r.tol = effective_tol(params, ob);
  r.method = params.method;
  return r;
}

void finish_stage(SolveResult& r, const Problem& pb, const ObstacleSpec& ob, const SolveParams& params, int stage,
                  long iters) {
  const ResidualField res = residuals(r.field, pb.fam, pb.eps, ob);
  r.res_int = res.interior_sup;
  r.res_comp = res.comp_sup;
  r.residual_history.push_back({stage, iters, r.res_int, r.res_comp});
  r.iterations.push_back(iters);
  r.eps_schedule.push_back(pb.eps);
  log_line(params, stage, pb.eps, iters, r.res_int, r.res_comp);
}

// One stage of PSOR on an existing result (warm start in r.field).
void psor_stage(SolveResult& r, const Problem& pb, const ObstacleSpec& ob, const SolveParams& params, int stage) {
  const Grid& g = pb.grid;
  const std::size_t P = g.plane_size();
  const int top = g.top();
  const double omega = params.omega;
  const double tol = r.tol;
  const long max_iters = params.max_iters > 0 ? params.max_iters : default_max_iters(SolveMethod::Psor);
  const double inv2hy = 1.0 / (2.0 * g.hy());
  const double interior_d = 2.0 * pb.iy2;
  double* u = r.field.values().data();

  project_plane(r.field, pb);
  record_energy(r, pb, stage, 0, tol);

  long iter = 0;
  bool done = false;
  while (iter < max_iters) {
    ++iter;
    double max_int = 0.0;
    double max_comp = 0.0;
    for (int j = 1; j < top; ++j) {
      double* layer = u + g.index(0, j);
      const double* up = layer + P;
      const double* down = layer - P;
      for (std::size_t p = 0; p < P; ++p) {
        const PlaneRow& row = pb.lap.row(p);
        if (row.fixed) continue;
        const double D = row.diag + interior_d;
        const double S = interior_sum(row, layer, up, down, p, pb.iy2);
        const double old = layer[p];
        const double F = D * old - S + pb.beta(old);
        max_int = std::max(max_int, std::abs(F));
        const double hi = S / D;
        const double v = old <= hi ? node_root(pb, D, S, old, F, params.newton_inner)
                                   : node_root(pb, D, S, hi, D * hi - S + pb.beta(hi), params.newton_inner);
        layer[p] = std::max(0.0, old + omega * (v - old));
      }
    }
    {
      double* layer = u + g.index(0, top);
      const double* d1 = layer - P;
      const double* d2 = layer - 2 * P;
      for (std::size_t p = 0; p < P; ++p) {
        const PlaneRow& row = pb.lap.row(p);
        if (row.fixed) continue;
        const double D = row.diag + 3.0 * inv2hy;
        double S = (4.0 * d1[p] - d2[p]) * inv2hy;
        for (int q = 0; q < row.count; ++q) S += row.w[q] * layer[row.nb[q]];
        const double old = layer[p];
        max_comp = std::max(max_comp, std::abs(std::min(old - pb.phi[p], D * old - S)));
        layer[p] = std::max(pb.phi[p], old + omega * (S / D - old));
      }
    }

    const bool sample = params.diagnostics_every > 0 && iter % params.diagnostics_every == 0;
    if (sample) {
      r.residual_history.push_back({stage, iter, max_int, max_comp});
      record_energy(r, pb, stage, iter, tol);
    }
    if (params.progress_every > 0 && iter % params.progress_every == 0) {
      log_line(params, stage, pb.eps, iter, max_int, max_comp);
    }
    if (max_int <= tol && max_comp <= tol) {
      const ResidualField res = residuals(r.field, pb.fam, pb.eps, ob);
      if (res.interior_sup <= tol && res.comp_sup <= tol) {
        done = true;
        break;
      }
    }
  }
  record_energy(r, pb, stage, iter, tol);
  finish_stage(r, pb, ob, params, stage, iter);
  r.converged = done && r.res_int <= tol && r.res_comp <= tol;
}

// Plane operator in banded form for the explicit flow: weights of the
// neighbours at offsets -1, +1, -nx, +nx (zero when absent) so that a layer
// update is a fixed-offset stencil the compiler can vectorise.
struct BandedPlane {
  std::vector<double> wl, wr, wd, wu, diag, active;
  std::ptrdiff_t stride = 0;

  explicit BandedPlane(const Grid& g, const PlaneLaplacian& lap)
      : wl(g.plane_size(), 0.0),
        wr(g.plane_size(), 0.0),
        wd(g.plane_size(), 0.0),
        wu(g.plane_size(), 0.0),
        diag(g.plane_size(), 0.0),
        active(g.plane_size(), 0.0),
        stride(g.nx()) {
    for (std::size_t p = 0; p < g.plane_size(); ++p) {
      const PlaneRow& row = lap.row(p);
      if (row.fixed) continue;
      active[p] = 1.0;
      diag[p] = row.diag;
      for (int q = 0; q < row.count; ++q) {
        const auto off = static_cast<std::ptrdiff_t>(row.nb[q]) - static_cast<std::ptrdiff_t>(p);
        if (off == -1) {
          wl[p] += row.w[q];
        } else if (off == 1) {
          wr[p] += row.w[q];
        } else if (off == -stride) {
          wd[p] += row.w[q];
        } else {
          wu[p] += row.w[q];
        }
      }
    }
  }
};

// sum_k w_k u_{p + off_k} over one layer; `u` points at the layer start.
template <bool TwoAxes>
inline double banded_sum(const BandedPlane& bp, const double* u, std::size_t p) noexcept {
  double s = bp.wl[p] * u[p - 1] + bp.wr[p] * u[p + 1];
  if constexpr (TwoAxes) s += bp.wd[p] * u[p - bp.stride] + bp.wu[p] * u[p + bp.stride];
  return s;
}

// One explicit Euler step from u into w. Returns the sup-norm of the time
// derivative; the running maximum is kept per plane column (`colmax`) so the
// node loops carry no reduction and vectorise.
template <bool TwoAxes, bool Rational>
__attribute__((target_clones("avx2", "default"))) double parabolic_step(const Problem& pb, const BandedPlane& bp, const double* __restrict u, double* __restrict w,
                      double* __restrict colmax, double dt) {
  const Grid& g = pb.grid;
  const std::size_t P = g.plane_size();
  const int top = g.top();
  const double iy2 = pb.iy2;
  const double inv_eps = pb.inv_eps;
  const double c = pb.fam.scale();
  const double inv2hy = 1.0 / (2.0 * g.hy());
  std::fill_n(colmax, P, 0.0);
  for (int j = 1; j < top; ++j) {
    const double* layer = u + g.index(0, j);
    double* out = w + g.index(0, j);
    for (std::size_t p = 0; p < P; ++p) {
      const double old = layer[p];
      double b;
      if constexpr (Rational) {
        const double s = std::max(old, 0.0) * inv_eps;
        const double q = 1.0 / (1.0 + s);
        b = c * s * q * q * q * inv_eps;
      } else {
        b = pb.beta(old);
      }
      const double S = banded_sum<TwoAxes>(bp, layer, p) + (layer[p + P] + layer[p - P]) * iy2;
      const double rate = bp.active[p] * (S - (bp.diag[p] + 2.0 * iy2) * old - b);
      colmax[p] = std::max(colmax[p], std::abs(rate));
      out[p] = old + dt * rate;
    }
  }
  const double* layer = u + g.index(0, top);
  double* out = w + g.index(0, top);
  for (std::size_t p = 0; p < P; ++p) {
    const double old = layer[p];
    const double S = banded_sum<TwoAxes>(bp, layer, p) + (4.0 * layer[p - P] - layer[p - 2 * P]) * inv2hy;
    const double D = bp.diag[p] + 3.0 * inv2hy;
    double moved = std::max(pb.phi[p], old + dt * (S - D * old));
    moved = bp.active[p] > 0.0 ? moved : old;
    colmax[p] = std::max(colmax[p], std::abs(moved - old) / dt);
    out[p] = moved;
  }
  double m = 0.0;
  for (std::size_t p = 0; p < P; ++p) m = std::max(m, colmax[p]);
  return m;
}

void parabolic_stage(SolveResult& r, const Problem& pb, const ObstacleSpec& ob, const SolveParams& params,
                     int stage) {
  const Grid& g = pb.grid;
  const double tol = r.tol;
  const long max_iters = params.max_iters > 0 ? params.max_iters : default_max_iters(SolveMethod::Parabolic);
  const double h2 = std::min(g.hx() * g.hx(), g.hy() * g.hy());
  const double dt = params.dt_safety * h2 / (2.0 * (g.plane_dim() + 1));
  const BandedPlane bp(g, pb.lap);
  const bool two_axes = g.plane_axes() == 2;
  const bool rational = pb.fam.shape() == PenaltyShape::RationalCube;
  auto step = two_axes ? (rational ? &parabolic_step<true, true> : &parabolic_step<true, false>)
                       : (rational ? &parabolic_step<false, true> : &parabolic_step<false, false>);

  project_plane(r.field, pb);
  // padded copies: the banded stencil reads (with zero weight) one stride
  // past either end of the array
  const std::size_t pad = static_cast<std::size_t>(g.nx()) + 1;
  const auto vals = r.field.values();
  std::vector<double> cur(vals.size() + 2 * pad, 0.0);
  std::copy(vals.begin(), vals.end(), cur.begin() + static_cast<std::ptrdiff_t>(pad));
  std::vector<double> next = cur;
  std::vector<double> colmax(g.plane_size(), 0.0);
  auto store = [&] {
    std::copy_n(cur.begin() + static_cast<std::ptrdiff_t>(pad), vals.size(), r.field.values().begin());
  };
  record_energy(r, pb, stage, 0, tol);

  long iter = 0;
  bool done = false;
  while (iter < max_iters) {
    ++iter;
    const double max_rate = step(pb, bp, cur.data() + pad, next.data() + pad, colmax.data(), dt);
    cur.swap(next);
    if (params.diagnostics_every > 0 && iter % (50L * params.diagnostics_every) == 0) {
      store();
      r.residual_history.push_back({stage, iter, max_rate, 0.0});
      record_energy(r, pb, stage, iter, tol);
    }
    if (params.progress_every > 0 && iter % params.progress_every == 0) {
      log_line(params, stage, pb.eps, iter, max_rate, 0.0);
    }
    if (max_rate <= tol) {
      done = true;
      break;
    }
  }
  store();
  record_energy(r, pb, stage, iter, tol);
  finish_stage(r, pb, ob, params, stage, iter);
  r.converged = done;
}

void run_stage(SolveResult& r, const Grid& grid, const PenaltyFamily& fam, const ObstacleSpec& ob,
               const SolveParams& params, double eps, int stage) {
  if (!grid.same_lattice(r.field.grid())) throw Error(ErrorCode::GridMismatch, "initial field is on another grid");
  const Problem pb(grid, fam, ob, eps);
  r.eps_final = eps;
  if (params.method == SolveMethod::Psor) {
    psor_stage(r, pb, ob, params, stage);
  } else {
    parabolic_stage(r, pb, ob, params, stage);
  }
}

void check_single(const Grid& grid, const SolveParams& params, double eps) {
  SolveParams single = params;
  single.eps_schedule = {eps};
  validate_params(grid, single);
}

}  // namespace

SolveResult psor_solve(const Grid& grid, const PenaltyFamily& fam, const ObstacleSpec& ob, const SolveParams& params,
                       Field init, double eps) {
  check_single(grid, params, eps);
  SolveParams p = params;
  p.method = SolveMethod::Psor;
  SolveResult r = start_result(std::move(init), eps, p, ob);
  run_stage(r, grid, fam, ob, p, eps, 0);
  return r;
}

SolveResult parabolic_solve(const Grid& grid, const PenaltyFamily& fam, const ObstacleSpec& ob,
                            const SolveParams& params, Field init, double eps) {
  check_single(grid, params, eps);
  SolveParams p = params;
  p.method = SolveMethod::Parabolic;
  SolveResult r = start_result(std::move(init), eps, p, ob);
  run_stage(r, grid, fam, ob, p, eps, 0);
  return r;
}

std::vector<SolveResult> continuation_solve(const Grid& grid, const PenaltyFamily& fam, const ObstacleSpec& ob,
                                            const SolveParams& params) {
  validate_params(grid, params);
  const std::vector<double> schedule = make_schedule(grid, params);
  Field init = params.method == SolveMethod::Psor ? initial_guess(grid, ob) : parabolic_initial_datum(grid, ob);
  SolveResult r = start_result(std::move(init), schedule.front(), params, ob);
  std::vector<SolveResult> out;
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    try {
      run_stage(r, grid, fam, ob, params, schedule[k], static_cast<int>(k));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (stage " + std::to_string(k) + ", eps = " +
                                format_double(schedule[k]) + ")");
    }
    out.push_back(r);
    if (!r.converged) break;
  }
  return out;
}

}  // namespace fbp
