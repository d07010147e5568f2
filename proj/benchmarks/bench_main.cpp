#include <benchmark/benchmark.h>

#include <vector>

#include "fbp/operators.hpp"
#include "fbp/oracle.hpp"
#include "fbp/reduced_obstacle.hpp"
#include "fbp/solver.hpp"

using namespace fbp;

namespace {

Grid grid_for(int nx) {
  return build_grid(GridSpec{.plane_dim = 1, .half_width = 6.0, .depth = 4.0, .nx = nx, .ny = (nx - 1) / 2 + 1});
}

// fixed number of sweeps; convergence is not the point here
void BM_PsorSweeps(benchmark::State& state) {
  const Grid g = grid_for(static_cast<int>(state.range(0)));
  const auto fam = PenaltyFamily::rational_cube();
  const auto ob = ObstacleSpec::parabolic_skirt(0.25);
  SolveParams p;
  p.max_iters = 20;
  p.tol = 1e-300;
  const Field init = initial_guess(g, ob);
  for (auto _ : state) {
    SolveResult r = psor_solve(g, fam, ob, p, init, 0.2);
    benchmark::DoNotOptimize(r.field.values().data());
  }
  state.SetItemsProcessed(state.iterations() * 20 * static_cast<long>(g.size()));
}
BENCHMARK(BM_PsorSweeps)->Arg(129)->Arg(257)->Arg(513)->Unit(benchmark::kMillisecond);

void BM_ParabolicSteps(benchmark::State& state) {
  const Grid g = grid_for(static_cast<int>(state.range(0)));
  const auto fam = PenaltyFamily::rational_cube();
  const auto ob = ObstacleSpec::parabolic_skirt(0.25);
  SolveParams p;
  p.method = SolveMethod::Parabolic;
  p.max_iters = 200;
  p.tol = 1e-300;
  const Field init = parabolic_initial_datum(g, ob);
  for (auto _ : state) {
    SolveResult r = parabolic_solve(g, fam, ob, p, init, 0.2);
    benchmark::DoNotOptimize(r.field.values().data());
  }
  state.SetItemsProcessed(state.iterations() * 200 * static_cast<long>(g.size()));
}
BENCHMARK(BM_ParabolicSteps)->Arg(129)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_Residuals(benchmark::State& state) {
  const Grid g = grid_for(static_cast<int>(state.range(0)));
  const auto fam = PenaltyFamily::rational_cube();
  const auto ob = ObstacleSpec::parabolic_skirt(0.25);
  const Field f = initial_guess(g, ob);
  for (auto _ : state) {
    ResidualField r = residuals(f, fam, 0.1, ob);
    benchmark::DoNotOptimize(r.interior_sup);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_Residuals)->Arg(257)->Arg(513)->Arg(1025);

void BM_OracleProfile(benchmark::State& state) {
  const auto fam = PenaltyFamily::rational_cube();
  std::vector<double> ys;
  for (int k = 0; k < state.range(0); ++k) ys.push_back(-4.0 * k / static_cast<double>(state.range(0)));
  for (auto _ : state) {
    OracleProfile p = ode1d_penalized(fam, 1.0, 0.05, ys);
    benchmark::DoNotOptimize(p.u.data());
  }
}
BENCHMARK(BM_OracleProfile)->Arg(65)->Arg(257)->Unit(benchmark::kMillisecond);

void BM_ReducedSolve(benchmark::State& state) {
  const Grid g = build_grid(GridSpec{.plane_dim = 1, .half_width = 1.0, .depth = 1.0,
                                     .nx = static_cast<int>(state.range(0)), .ny = 3});
  ReducedProblem p{g, std::vector<double>(g.plane_size(), 1.0), std::vector<double>(g.plane_size(), kFreeNode), false};
  p.dirichlet[0] = 0.1;
  p.dirichlet[g.plane_size() - 1] = 0.05;
  ReducedParams prm;
  prm.tol = 1e-12;
  for (auto _ : state) {
    ReducedSolution s = solve_reduced(p, prm);
    benchmark::DoNotOptimize(s.w.values.data());
  }
}
BENCHMARK(BM_ReducedSolve)->Arg(65)->Arg(257)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
