#include "fbp_app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "fbp/csv.hpp"
#include "fbp/error.hpp"
#include "fbp/operators.hpp"
#include "fbp/oracle.hpp"

#ifndef FBP_VERSION
#define FBP_VERSION "0.0.0"
#endif

namespace fbp::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string out_dir(const RunConfig& cfg, const CommandOptions& opt) {
  return opt.out_dir.empty() ? cfg.output_dir : opt.out_dir;
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir_ + ": " + ec.message());
  }

  template <class F>
  void write(const std::string& name, F&& body) {
    const std::string path = (fs::path(dir_) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    body(out);
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path);
    names_.push_back(name);
  }

  void json_file(const std::string& name, const json& j) {
    write(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }

  // Data files first, manifest last; the manifest is the only file that
  // carries wall-clock time.
  void manifest(const std::string& command, const RunConfig& cfg, int exit_code, double seconds) {
    json m;
    m["schema"] = kManifestSchema;
    m["command"] = command;
    m["config"] = to_json(cfg);
    m["versions"] = {{"fbp", FBP_VERSION},
                     {"report_schema", kReportSchema},
                     {"compiler", __VERSION__},
                     {"cplusplus", static_cast<long>(__cplusplus)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    m["artifacts"] = names_;
    m["exit_code"] = exit_code;
    m["wall_time_s"] = seconds;
    json_file("manifest.json", m);
  }

 private:
  std::string dir_;
  std::vector<std::string> names_;
};

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

json solve_json(const SolveResult& r) {
  json stages = json::array();
  for (std::size_t k = 0; k < r.eps_schedule.size(); ++k) {
    stages.push_back({{"eps", r.eps_schedule[k]}, {"iterations", k < r.iterations.size() ? r.iterations[k] : 0}});
  }
  return {{"method", to_string(r.method)},
          {"converged", r.converged},
          {"eps_final", num(r.eps_final)},
          {"tol", num(r.tol)},
          {"res_int", num(r.res_int)},
          {"res_comp", num(r.res_comp)},
          {"energy_increases", r.energy_increases},
          {"stages", stages}};
}

json extract_json(const FreeBoundary& fb) {
  json pts = json::array();
  for (const auto& b : fb.boundary_points) {
    if (fb.grid.plane_axes() == 2) {
      pts.push_back({b[0], b[1]});
    } else {
      pts.push_back(b[0]);
    }
  }
  long omega = 0;
  long coincidence = 0;
  for (std::size_t p = 0; p < fb.omega_mask.size(); ++p) {
    omega += fb.omega_mask[p];
    coincidence += fb.coincidence_mask[p];
  }
  json j = {{"level_used", fb.level_used},
            {"plane_threshold", fb.plane_threshold},
            {"coincidence_tol", fb.coincidence_tol},
            {"omega_nodes", omega},
            {"coincidence_nodes", coincidence},
            {"boundary_point_count", static_cast<long>(fb.boundary_points.size())},
            {"graph_violations", fb.graph_violations},
            {"truncation_suspect", fb.truncation_suspect}};
  if (fb.grid.plane_axes() == 1) j["boundary_points"] = pts;
  return j;
}

json slab_oracle_json(const RunConfig& cfg, const SolveResult& r, const PenaltyFamily& fam, bool& pass) {
  const Field& f = r.field;
  const Grid& g = f.grid();
  std::vector<double> ys(static_cast<std::size_t>(g.ny()));
  for (int j = 0; j < g.ny(); ++j) ys[static_cast<std::size_t>(j)] = std::min(g.y(j), 0.0);
  const OracleProfile prof = ode1d_penalized(fam, cfg.slab.M, r.eps_final, ys);
  double gap = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (std::size_t p = 0; p < g.plane_size(); ++p) {
      gap = std::max(gap, std::abs(f.at(p, j) - prof.u[static_cast<std::size_t>(j)]));
    }
  }
  double slope = 0.0;
  for (std::size_t p = 0; p < g.plane_size(); ++p) slope = std::max(slope, uy_at_plane(f, p));
  pass = gap <= cfg.slab.gap_tol;
  return {{"M", cfg.slab.M},
          {"eps", r.eps_final},
          {"sup_gap", gap},
          {"slope_numeric", slope},
          {"slope_oracle", prof.slope_at_plane},
          {"slope_limit", std::sqrt(2.0 * fam.mass())},
          {"pass", pass},
          {"tolerance", {{"sup_gap_max", cfg.slab.gap_tol}}}};
}

std::string csv_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

void write_reduced_csv(std::ostream& out, const ReducedProblem& p, const std::vector<double>& w) {
  const Grid& g = p.grid;
  out << (g.plane_axes() == 2 ? "x1,x2," : (g.axisymmetric() ? "r," : "x,")) << "g,w,fixed\n";
  for (std::size_t k = 0; k < g.plane_size(); ++k) {
    const PlanePoint x = g.plane_point(k);
    std::vector<double> row{x[0]};
    if (g.plane_axes() == 2) row.push_back(x[1]);
    row.push_back(p.g[k]);
    row.push_back(w[k]);
    row.push_back(std::isnan(p.dirichlet[k]) ? 0.0 : 1.0);
    write_csv_row(out, row);
  }
}

void write_pipeline_files(ArtifactWriter& w, const PipelineResult& r) {
  if (r.solve) w.write("solution.csv", [&](std::ostream& o) { write_field_csv(o, r.solve->field); });
  if (r.fb) {
    w.write("fb.csv", [&](std::ostream& o) { write_fb_csv(o, *r.fb); });
    w.write("boundary.csv", [&](std::ostream& o) { write_boundary_csv(o, *r.fb); });
  }
}

void say(const CommandOptions& opt, const std::string& line) {
  if (opt.log != nullptr) *opt.log << line << '\n';
}

int finish_pipeline_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opt,
                            const Stopwatch& sw) {
  const PipelineResult r = run_pipeline(cfg, opt.progress);
  ArtifactWriter w(out_dir(cfg, opt));
  write_pipeline_files(w, r);
  w.json_file("report.json", r.report);
  w.manifest(name, cfg, r.exit_code, sw.seconds());
  say(opt, name + ": exit " + std::to_string(r.exit_code) + ", artifacts in " + out_dir(cfg, opt));
  return r.exit_code;
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg, std::ostream* progress) {
  PipelineResult out;
  const Grid grid = build_grid(cfg.grid);
  const ObstacleSpec ob = make_obstacle(cfg);
  const PenaltyFamily fam = make_penalty(cfg);
  SolveParams params = cfg.solver;
  params.progress = progress;

  out.report["schema"] = kReportSchema;
  out.report["mode"] = to_string(cfg.mode);
  try {
    auto stages = continuation_solve(grid, fam, ob, params);
    out.solve.emplace(std::move(stages.back()));
  } catch (const Error& e) {
    out.report["solve"] = {{"converged", false}, {"error", e.what()}};
    out.report["all_pass"] = false;
    out.exit_code = kSolverFailure;
    return out;
  }
  const SolveResult& res = *out.solve;
  out.report["solve"] = solve_json(res);
  if (!res.converged) {
    out.report["all_pass"] = false;
    out.exit_code = kSolverFailure;
    return out;
  }

  try {
    out.fb.emplace(extract_free_boundary(res, ob, cfg.extract));
    out.report["extract"] = extract_json(*out.fb);
  } catch (const Error& e) {
    out.report["extract"] = {{"error", e.what()}};
  }

  if (cfg.mode == Mode::SlabTest) {
    bool pass = false;
    out.report["slab_oracle"] = slab_oracle_json(cfg, res, fam, pass);
    out.report["all_pass"] = pass;
    out.exit_code = pass ? kOk : kChecksFailed;
    return out;
  }
  if (!out.fb) {
    out.report["all_pass"] = false;
    out.exit_code = kChecksFailed;
    return out;
  }
  out.checks.emplace(verify_all(res, *out.fb, ob, cfg.verify));
  json checks = to_json(*out.checks);
  for (auto& [k, v] : checks.items()) out.report[k] = v;
  out.exit_code = out.checks->all_pass() ? kOk : kChecksFailed;
  return out;
}

int cmd_solve(const RunConfig& cfg, const CommandOptions& opt) {
  const Stopwatch sw;
  return finish_pipeline_command("solve", cfg, opt, sw);
}

int cmd_axisym(const RunConfig& cfg, const CommandOptions& opt) {
  const Stopwatch sw;
  return finish_pipeline_command("axisym", cfg, opt, sw);
}

int cmd_oracle(const RunConfig& cfg, const CommandOptions& opt) {
  const Stopwatch sw;
  const PenaltyFamily fam = make_penalty(cfg);
  const double depth = cfg.oracle.depth > 0.0 ? cfg.oracle.depth : cfg.grid.depth;
  const double M = cfg.oracle.M;
  std::vector<double> ys(static_cast<std::size_t>(cfg.oracle.samples));
  for (std::size_t k = 0; k < ys.size(); ++k) {
    ys[k] = -depth * static_cast<double>(k) / static_cast<double>(ys.size() - 1);
  }

  ArtifactWriter w(out_dir(cfg, opt));
  json profiles = json::array();
  std::vector<std::vector<double>> table;
  for (std::size_t e = 0; e < cfg.oracle.eps.size(); ++e) {
    const double eps = cfg.oracle.eps[e];
    const OracleProfile prof = ode1d_penalized(fam, M, eps, ys);
    double gap = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) gap = std::max(gap, std::abs(prof.u[k] - slab_exact(M, ys[k])));
    const std::string name = "profile_" + std::to_string(e) + ".csv";
    w.write(name, [&](std::ostream& o) { write_profile_csv(o, prof); });
    profiles.push_back({{"eps", eps}, {"file", name}, {"slope_at_plane", prof.slope_at_plane}, {"sup_gap_to_limit", gap}});
    table.push_back({eps, prof.slope_at_plane, gap});
  }
  w.write("oracle.csv", [&](std::ostream& o) {
    o << "eps,slope_at_plane,sup_gap_to_limit\n";
    for (const auto& row : table) write_csv_row(o, row);
  });
  const json report = {{"schema", kReportSchema},
                       {"mode", to_string(cfg.mode)},
                       {"M", M},
                       {"mass", fam.mass()},
                       {"slope_limit", std::sqrt(2.0 * fam.mass())},
                       {"profiles", profiles}};
  w.json_file("report.json", report);
  w.manifest("oracle", cfg, kOk, sw.seconds());
  say(opt, "oracle: " + std::to_string(profiles.size()) + " profiles in " + out_dir(cfg, opt));
  return kOk;
}

int cmd_reduce(const RunConfig& cfg, const CommandOptions& opt) {
  const Stopwatch sw;
  PipelineResult r = run_pipeline(cfg, opt.progress);
  ArtifactWriter w(out_dir(cfg, opt));
  write_pipeline_files(w, r);
  int code = r.exit_code == kSolverFailure ? kSolverFailure : kChecksFailed;
  if (r.fb) {
    const ObstacleSpec ob = make_obstacle(cfg);
    const ReducedProblem rp = reduced_from_full(*r.fb, ob);
    const ReducedSolution sol = solve_reduced(rp, cfg.reduce.params);
    const double thr = cfg.reduce.threshold >= 0.0 ? cfg.reduce.threshold : r.fb->plane_threshold;
    json red = {{"globalization", "inner Dirichlet data copied from the full trace on |x - c| <= 1 + rho0; "
                                  "g = max(u_y, 0); zero on the lateral faces"},
                {"iterations", sol.iterations},
                {"comp_residual", sol.comp_residual},
                {"threshold", thr},
                {"tolerance", {{"hausdorff_cells_max", cfg.reduce.max_cells}}}};
    try {
      const BoundaryDistance d = compare_boundaries(*r.fb, sol.w, thr);
      red["hausdorff_cells"] = d.hausdorff_cells;
      red["full_to_reduced_cells"] = d.full_to_reduced_cells;
      red["reduced_to_full_cells"] = d.reduced_to_full_cells;
      red["pass"] = d.hausdorff_cells <= cfg.reduce.max_cells;
    } catch (const Error& e) {
      red["error"] = e.what();
      red["pass"] = false;
    }
    try {
      red["hausdorff_cells_at_zero"] = compare_boundaries(*r.fb, sol.w, 0.0).hausdorff_cells;
    } catch (const Error& e) {
      red["hausdorff_cells_at_zero"] = nullptr;
    }
    r.report["reduced"] = red;
    if (red["pass"].get<bool>()) code = kOk;
    w.write("reduced.csv", [&](std::ostream& o) { write_reduced_csv(o, rp, sol.w.values); });
  }
  w.json_file("report.json", r.report);
  w.manifest("reduce", cfg, code, sw.seconds());
  say(opt, "reduce: exit " + std::to_string(code) + ", artifacts in " + out_dir(cfg, opt));
  return code;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt) {
  const Stopwatch sw;
  std::vector<RunConfig> runs;
  std::vector<SweepLevel> levels = cfg.sweep.levels;
  if (levels.empty()) levels.push_back({cfg.grid.nx, cfg.grid.ny});
  for (const auto& l : levels) {
    for (double e0 : cfg.sweep.eps0) {
      for (double r0 : cfg.sweep.rho0) {
        RunConfig c = cfg;
        c.mode = cfg.sweep.base;
        if (c.mode == Mode::Axisym) {
          c.grid.geometry = Geometry::Axisymmetric;
          if (cfg.grid.geometry != Geometry::Axisymmetric) c.grid.plane_dim = 2;
        }
        c.grid.nx = l.nx;
        c.grid.ny = l.ny;
        c.obstacle.rho0 = r0;
        c.solver.eps0 = e0;
        runs.push_back(std::move(c));
      }
    }
  }

  std::vector<std::string> rows(runs.size());
  std::vector<char> ok(runs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < runs.size(); k = next++) {
      const RunConfig& c = runs[k];
      std::ostringstream row;
      std::string status = "ok";
      std::string error;
      PipelineResult r;
      try {
        validate_params(build_grid(c.grid), c.solver);
        r = run_pipeline(c, nullptr);
        if (r.exit_code == kSolverFailure) {
          status = "solver_failure";
          if (r.report.contains("solve") && r.report["solve"].contains("error")) {
            error = r.report["solve"]["error"].get<std::string>();
          }
        }
      } catch (const Error& e) {
        status = "error";
        error = e.what();
      }
      const auto& ch = r.checks;
      auto val = [&](auto get) -> double {
        if (!ch) return std::numeric_limits<double>::quiet_NaN();
        return get(*ch);
      };
      std::vector<double> nums{
          static_cast<double>(k),
          c.obstacle.rho0,
          c.solver.eps0,
          static_cast<double>(c.grid.nx),
          static_cast<double>(c.grid.ny),
          r.solve ? r.solve->eps_final : std::numeric_limits<double>::quiet_NaN(),
          r.solve ? (r.solve->converged ? 1.0 : 0.0) : 0.0,
          val([](const VerificationReport& v) {
            return v.support_growth.value ? v.support_growth.value->rho1 : std::nan("");
          }),
          val([](const VerificationReport& v) {
            return v.support_growth.value ? v.support_growth.value->delta1 : std::nan("");
          }),
          val([](const VerificationReport& v) { return v.quadratic.value ? v.quadratic.value->exponent_u : std::nan(""); }),
          val([](const VerificationReport& v) {
            return v.quadratic.value ? v.quadratic.value->exponent_psi : std::nan("");
          }),
          val([](const VerificationReport& v) { return v.quadratic.value ? v.quadratic.value->coef_u : std::nan(""); }),
          val([](const VerificationReport& v) { return v.quadratic.value ? v.quadratic.value->coef_psi : std::nan(""); }),
          val([](const VerificationReport& v) { return v.holder.value ? v.holder.value->alpha_sup : std::nan(""); }),
          val([](const VerificationReport& v) { return v.holder.value ? v.holder.value->alpha_avg : std::nan(""); }),
          val([](const VerificationReport& v) { return v.support_growth.pass() ? 1.0 : 0.0; }),
          val([](const VerificationReport& v) { return v.cone_monotonicity.pass() ? 1.0 : 0.0; }),
          val([](const VerificationReport& v) { return v.all_pass() ? 1.0 : 0.0; }),
      };
      for (const double v : nums) row << (std::isnan(v) ? std::string() : format_double(v)) << ',';
      row << status << ',' << csv_text(error) << '\n';
      rows[k] = row.str();
      ok[k] = status == "ok" ? 1 : 0;
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  ArtifactWriter w(out_dir(cfg, opt));
  w.write("sweep.csv", [&](std::ostream& o) {
    o << "run,rho0,eps0,nx,ny,eps_final,converged,rho1,delta1,exponent_u,exponent_psi,coef_u,coef_psi,alpha_sup,"
         "alpha_avg,support_pass,cone_pass,all_pass,status,error\n";
    for (const auto& r : rows) o << r;
  });
  const bool all_ok = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  const int code = all_ok ? kOk : kChecksFailed;
  w.manifest("sweep", cfg, code, sw.seconds());
  say(opt, "sweep: " + std::to_string(runs.size()) + " runs, exit " + std::to_string(code));
  return code;
}

int cmd_verify(const RunConfig& cfg, const CommandOptions& opt) {
  const std::string dir = out_dir(cfg, opt);
  const Grid grid = build_grid(cfg.grid);
  const ObstacleSpec ob = make_obstacle(cfg);

  std::ifstream rin(fs::path(dir) / "report.json");
  if (!rin) throw Error(ErrorCode::Io, "no report.json in " + dir);
  const json saved = json::parse(rin, nullptr, false);
  if (saved.is_discarded() || !saved.contains("solve") || !saved["solve"].contains("eps_final")) {
    throw Error(ErrorCode::Io, "report.json in " + dir + " has no solve block");
  }
  std::ifstream fin(fs::path(dir) / "solution.csv");
  if (!fin) throw Error(ErrorCode::Io, "no solution.csv in " + dir);

  SolveResult res(read_field_csv(fin, grid));
  res.eps_final = saved["solve"]["eps_final"].get<double>();
  res.tol = saved["solve"]["tol"].get<double>();
  res.converged = saved["solve"]["converged"].get<bool>();
  if (!res.converged) {
    say(opt, "verify: saved solve did not converge");
    return kSolverFailure;
  }
  const FreeBoundary fb = extract_free_boundary(res, ob, cfg.extract);
  const VerificationReport rep = verify_all(res, fb, ob, cfg.verify);
  json out = to_json(rep);
  out["mode"] = to_string(cfg.mode);
  out["extract"] = extract_json(fb);

  ArtifactWriter w(dir);
  w.json_file("verify_report.json", out);
  const int code = rep.all_pass() ? kOk : kChecksFailed;
  say(opt, "verify: exit " + std::to_string(code));
  return code;
}

Mode peek_mode(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("mode") || !doc["mode"].is_string()) return Mode::Full;
  const std::string m = doc["mode"].get<std::string>();
  if (m == "AXISYM") return Mode::Axisym;
  if (m == "SLAB_TEST") return Mode::SlabTest;
  if (m == "REDUCED") return Mode::Reduced;
  return Mode::Full;
}

int dispatch(const std::string& command, const std::string& config_path, const CommandOptions& opt) {
  Mode mode = Mode::Full;
  if (command == "axisym") {
    mode = Mode::Axisym;
  } else if (command == "oracle") {
    mode = Mode::Oracle;
  } else if (command == "reduce") {
    mode = Mode::Reduced;
  } else if (command == "sweep") {
    mode = Mode::Sweep;
  } else if (command != "solve" && command != "verify") {
    say(opt, "unknown command '" + command + "'");
    return kConfigInvalid;
  }

  RunConfig cfg;
  try {
    if (command == "verify" && !config_path.empty()) mode = peek_mode(config_path);
    cfg = config_path.empty() ? default_config(mode) : load_config(config_path, mode);
  } catch (const Error& e) {
    say(opt, std::string("config invalid: ") + e.what());
    return kConfigInvalid;
  }

  try {
    if (command == "solve") return cmd_solve(cfg, opt);
    if (command == "axisym") return cmd_axisym(cfg, opt);
    if (command == "oracle") return cmd_oracle(cfg, opt);
    if (command == "reduce") return cmd_reduce(cfg, opt);
    if (command == "sweep") return cmd_sweep(cfg, opt);
    return cmd_verify(cfg, opt);
  } catch (const Error& e) {
    say(opt, command + " failed: " + e.what());
    return kSolverFailure;
  } catch (const std::exception& e) {
    say(opt, command + " failed: " + e.what());
    return kSolverFailure;
  }
}

}  // namespace fbp::app
