#include "fbp_app/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "fbp/error.hpp"

namespace fbp::app {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::ConfigInvalid, key + ": " + msg);
}

// One JSON object being read; remembers its path for messages and rejects
// keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
    for (const auto& [k, v] : j_.items()) {
      if (allowed.count(k) == 0) fail(key(k), "unknown key");
    }
  }

  [[nodiscard]] std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  [[nodiscard]] bool has(const std::string& k) const { return j_.contains(k); }
  [[nodiscard]] const json& at(const std::string& k) const { return j_.at(k); }

  void get(const std::string& k, double& dst) const {
    if (!has(k)) return;
    const json& v = at(k);
    if (!v.is_number()) fail(key(k), "must be a number");
    dst = v.get<double>();
    if (!std::isfinite(dst)) fail(key(k), "must be finite");
  }
  void get(const std::string& k, int& dst) const {
    long v = dst;
    get(k, v);
    dst = static_cast<int>(v);
  }
  void get(const std::string& k, long& dst) const {
    if (!has(k)) return;
    const json& v = at(k);
    if (!v.is_number_integer()) fail(key(k), "must be an integer");
    dst = v.get<long>();
  }
  void get(const std::string& k, bool& dst) const {
    if (!has(k)) return;
    if (!at(k).is_boolean()) fail(key(k), "must be true or false");
    dst = at(k).get<bool>();
  }
  void get(const std::string& k, std::string& dst) const {
    if (!has(k)) return;
    if (!at(k).is_string()) fail(key(k), "must be a string");
    dst = at(k).get<std::string>();
  }
  void get(const std::string& k, std::vector<double>& dst) const {
    if (!has(k)) return;
    const json& v = at(k);
    if (!v.is_array()) fail(key(k), "must be an array of numbers");
    dst.clear();
    for (const auto& e : v) {
      if (!e.is_number()) fail(key(k), "must be an array of numbers");
      dst.push_back(e.get<double>());
    }
  }
  void get(const std::string& k, std::vector<std::pair<double, double>>& dst) const {
    if (!has(k)) return;
    const json& v = at(k);
    if (!v.is_array()) fail(key(k), "must be an array of [a, b] pairs");
    dst.clear();
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        fail(key(k), "must be an array of [a, b] pairs");
      }
      dst.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  }
  void get(const std::string& k, PlanePoint& dst) const {
    std::vector<double> v;
    get(k, v);
    if (!has(k)) return;
    if (v.empty() || v.size() > 2) fail(key(k), "must have one or two components");
    dst = {v[0], v.size() > 1 ? v[1] : 0.0};
  }

 private:
  const json& j_;
  std::string path_;
};

Mode parse_mode(const std::string& key, const std::string& s) {
  if (s == "FULL") return Mode::Full;
  if (s == "AXISYM") return Mode::Axisym;
  if (s == "SLAB_TEST") return Mode::SlabTest;
  if (s == "REDUCED") return Mode::Reduced;
  if (s == "SWEEP") return Mode::Sweep;
  if (s == "ORACLE") return Mode::Oracle;
  fail(key, "unknown mode '" + s + "' (FULL, AXISYM, SLAB_TEST, REDUCED, SWEEP, ORACLE)");
}

void read_grid(const Section& s, GridSpec& g) {
  s.get("plane_dim", g.plane_dim);
  s.get("half_width", g.half_width);
  s.get("depth", g.depth);
  s.get("nx", g.nx);
  s.get("ny", g.ny);
  std::string geom = g.geometry == Geometry::Axisymmetric ? "axisymmetric" : "cartesian";
  s.get("geometry", geom);
  if (geom == "cartesian") {
    g.geometry = Geometry::Cartesian;
  } else if (geom == "axisymmetric") {
    g.geometry = Geometry::Axisymmetric;
  } else {
    fail(s.key("geometry"), "must be \"cartesian\" or \"axisymmetric\"");
  }
  std::string bc = g.lateral_bc == LateralBc::Neumann ? "neumann" : "dirichlet";
  s.get("lateral_bc", bc);
  if (bc == "dirichlet") {
    g.lateral_bc = LateralBc::Dirichlet;
  } else if (bc == "neumann") {
    g.lateral_bc = LateralBc::Neumann;
  } else {
    fail(s.key("lateral_bc"), "must be \"dirichlet\" or \"neumann\"");
  }
}

void read_solver(const Section& s, SolveParams& p) {
  std::string method = p.method == SolveMethod::Parabolic ? "parabolic" : "psor";
  s.get("method", method);
  if (method == "psor") {
    p.method = SolveMethod::Psor;
  } else if (method == "parabolic") {
    p.method = SolveMethod::Parabolic;
  } else {
    fail(s.key("method"), "must be \"psor\" or \"parabolic\"");
  }
  s.get("omega", p.omega);
  s.get("tol", p.tol);
  s.get("max_iters", p.max_iters);
  s.get("eps0", p.eps0);
  s.get("gamma", p.gamma);
  s.get("eps_final", p.eps_final);
  s.get("eps_schedule", p.eps_schedule);
  s.get("newton_inner", p.newton_inner);
  s.get("dt_safety", p.dt_safety);
  s.get("diagnostics_every", p.diagnostics_every);
  s.get("progress_every", p.progress_every);
  if (p.newton_inner < 1) fail(s.key("newton_inner"), "must be at least 1");
  if (p.max_iters < 0) fail(s.key("max_iters"), "must be nonnegative");
  if (p.diagnostics_every < 1) fail(s.key("diagnostics_every"), "must be at least 1");
  if (p.progress_every < 0) fail(s.key("progress_every"), "must be nonnegative");
  if (!(p.dt_safety > 0.0 && p.dt_safety <= 1.0)) fail(s.key("dt_safety"), "must lie in (0, 1]");
}

void read_verify(const Section& s, VerifyTolerances& t) {
  s.get("theta0", t.theta0);
  s.get("cone_slack_factor", t.cone_slack_factor);
  s.get("support_min_factor", t.support_min_factor);
  s.get("uy_slack_factor", t.uy_slack_factor);
  s.get("collar_factor", t.collar_factor);
  s.get("bands", t.bands);
  s.get("band_tol", t.band_tol);
  s.get("exponent_lo", t.exponent_lo);
  s.get("exponent_hi", t.exponent_hi);
  s.get("coef_lo", t.coef_lo);
  s.get("coef_hi", t.coef_hi);
  s.get("d_max", t.d_max);
  s.get("holder_lambda", t.holder_lambda);
  s.get("holder_r2", t.holder_r2);
  if (!(t.theta0 >= 0.0 && t.theta0 < 0.5 * std::numbers::pi)) fail(s.key("theta0"), "must lie in [0, pi/2)");
  if (!(t.cone_slack_factor >= 0.0)) fail(s.key("cone_slack_factor"), "must be nonnegative");
  if (!(t.support_min_factor >= 0.0)) fail(s.key("support_min_factor"), "must be nonnegative");
  if (!(t.uy_slack_factor >= 0.0)) fail(s.key("uy_slack_factor"), "must be nonnegative");
  if (!(t.collar_factor > 0.0)) fail(s.key("collar_factor"), "must be positive");
  if (t.bands < 1) fail(s.key("bands"), "must be at least 1");
  if (!(t.band_tol > 0.0)) fail(s.key("band_tol"), "must be positive");
  if (!(t.exponent_lo < t.exponent_hi)) fail(s.key("exponent_lo"), "must be below exponent_hi");
  if (!(t.coef_lo < t.coef_hi)) fail(s.key("coef_lo"), "must be below coef_hi");
  if (!(t.holder_lambda > 0.0 && t.holder_lambda < 1.0)) fail(s.key("holder_lambda"), "must lie in (0, 1)");
  if (!(t.holder_r2 >= 0.0 && t.holder_r2 <= 1.0)) fail(s.key("holder_r2"), "must lie in [0, 1]");
}

void apply_mode_defaults(RunConfig& c) {
  switch (c.mode) {
    case Mode::Axisym:
      c.grid.geometry = Geometry::Axisymmetric;
      c.grid.plane_dim = 2;
      break;
    case Mode::SlabTest:
      c.grid.plane_dim = 1;
      c.grid.nx = 5;
      c.grid.half_width = 1.0;
      c.grid.lateral_bc = LateralBc::Neumann;
      c.obstacle.profile = "constant";
      c.solver.eps_final = 0.1;
      break;
    default:
      break;
  }
}

// Throws the core error re-labelled with a key path.
template <class F>
void relabel(const std::string& key, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    fail(key, e.what());
  }
}

void validate(RunConfig& c) {
  if (!c.deterministic) fail("deterministic", "must be true (runs are always deterministic)");
  if (c.mode == Mode::Axisym && c.grid.geometry != Geometry::Axisymmetric) {
    fail("grid.geometry", "must be \"axisymmetric\" in AXISYM mode");
  }
  if (c.mode == Mode::SlabTest) {
    if (c.obstacle.profile != "constant") fail("obstacle.profile", "must be \"constant\" in SLAB_TEST mode");
    if (c.grid.plane_dim != 1 || c.grid.geometry != Geometry::Cartesian) {
      fail("grid.plane_dim", "SLAB_TEST runs on a Cartesian N = 1 grid");
    }
    if (!(c.slab.M > 0.0)) fail("slab.M", "must be positive");
    if (!(c.slab.gap_tol > 0.0)) fail("slab.gap_tol", "must be positive");
    c.obstacle.value = c.slab.M;
  }
  if (c.output_dir.empty()) fail("output_dir", "must not be empty");
  if (!(c.extract.level_factor > 0.0)) fail("extract.level_factor", "must be positive");

  Grid grid(GridSpec{.plane_dim = 1, .half_width = 1.0, .depth = 1.0, .nx = 3, .ny = 3});
  relabel("grid", [&] { grid = build_grid(c.grid); });
  relabel("obstacle", [&] { (void)make_obstacle(c); });
  relabel("penalty", [&] { (void)make_penalty(c); });
  if (c.mode != Mode::Oracle && c.mode != Mode::Sweep) relabel("solver", [&] { validate_params(grid, c.solver); });

  if (!(c.oracle.M > 0.0)) fail("oracle.M", "must be positive");
  if (c.oracle.eps.empty()) fail("oracle.eps", "must not be empty");
  for (double e : c.oracle.eps) {
    if (!(e > 0.0)) fail("oracle.eps", "entries must be positive");
  }
  if (c.oracle.samples < 2) fail("oracle.samples", "must be at least 2");

  if (!(c.reduce.params.omega > 0.0 && c.reduce.params.omega < 2.0)) fail("reduce.omega", "must lie in (0, 2)");
  if (!(c.reduce.params.tol > 0.0)) fail("reduce.tol", "must be positive");
  if (c.reduce.params.max_iters < 1) fail("reduce.max_iters", "must be at least 1");
  if (!(c.reduce.max_cells >= 0.0)) fail("reduce.max_cells", "must be nonnegative");

  if (c.sweep.base != Mode::Full && c.sweep.base != Mode::Axisym) fail("sweep.base", "must be \"FULL\" or \"AXISYM\"");
  if (c.sweep.rho0.empty()) fail("sweep.rho0", "must not be empty");
  if (c.sweep.eps0.empty()) fail("sweep.eps0", "must not be empty");
  for (double r : c.sweep.rho0) {
    if (!(r > 0.0)) fail("sweep.rho0", "entries must be positive");
  }
  for (double e : c.sweep.eps0) {
    if (!(e > 0.0)) fail("sweep.eps0", "entries must be positive");
  }
  for (const auto& l : c.sweep.levels) {
    if (l.nx < 3 || l.nx % 2 == 0 || l.ny < 3 || l.ny % 2 == 0) fail("sweep.levels", "nx and ny must be odd and >= 3");
  }
}

json pairs_json(const std::vector<std::pair<double, double>>& v) {
  json a = json::array();
  for (const auto& [x, y] : v) a.push_back({x, y});
  return a;
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Full: return "FULL";
    case Mode::Axisym: return "AXISYM";
    case Mode::SlabTest: return "SLAB_TEST";
    case Mode::Reduced: return "REDUCED";
    case Mode::Sweep: return "SWEEP";
    case Mode::Oracle: return "ORACLE";
  }
  return "FULL";
}

RunConfig default_config(Mode mode) {
  RunConfig c;
  c.mode = mode;
  apply_mode_defaults(c);
  validate(c);
  return c;
}

RunConfig parse_config(const json& doc, Mode mode) {
  const Section root(doc, "",
                     {"schema_version", "mode", "grid", "obstacle", "penalty", "solver", "extract", "verify", "slab",
                      "oracle", "reduce", "sweep", "output_dir", "deterministic"});
  RunConfig c;
  if (!root.has("schema_version")) fail("schema_version", "missing (current version is 1)");
  root.get("schema_version", c.schema_version);
  if (c.schema_version != kConfigSchemaVersion) {
    fail("schema_version", "unsupported version " + std::to_string(c.schema_version) + " (expected 1)");
  }
  c.mode = mode;
  if (root.has("mode")) {
    std::string m;
    root.get("mode", m);
    const Mode given = parse_mode("mode", m);
    const bool compatible = given == mode || (mode == Mode::Full && given == Mode::SlabTest);
    if (!compatible) fail("mode", "'" + m + "' does not match the subcommand (" + to_string(mode) + ")");
    c.mode = given;
  }
  apply_mode_defaults(c);

  if (root.has("grid")) {
    read_grid(Section(root.at("grid"), "grid", {"plane_dim", "half_width", "depth", "nx", "ny", "geometry", "lateral_bc"}),
              c.grid);
  }
  if (root.has("obstacle")) {
    const Section s(root.at("obstacle"), "obstacle", {"profile", "rho0", "center", "value", "table", "table_file"});
    s.get("profile", c.obstacle.profile);
    s.get("rho0", c.obstacle.rho0);
    s.get("center", c.obstacle.center);
    s.get("value", c.obstacle.value);
    s.get("table", c.obstacle.table);
    s.get("table_file", c.obstacle.table_file);
    if (c.obstacle.profile != "parabolic_skirt" && c.obstacle.profile != "custom_radial" &&
        c.obstacle.profile != "constant") {
      fail("obstacle.profile", "must be \"parabolic_skirt\", \"custom_radial\" or \"constant\"");
    }
  }
  if (root.has("penalty")) {
    const Section s(root.at("penalty"), "penalty", {"shape", "mass", "table", "table_file"});
    s.get("shape", c.penalty.shape);
    s.get("mass", c.penalty.mass);
    s.get("table", c.penalty.table);
    s.get("table_file", c.penalty.table_file);
    if (c.penalty.shape != "rational_cube" && c.penalty.shape != "custom_table") {
      fail("penalty.shape", "must be \"rational_cube\" or \"custom_table\"");
    }
  }
  if (root.has("solver")) {
    read_solver(Section(root.at("solver"), "solver",
                        {"method", "omega", "tol", "max_iters", "eps0", "gamma", "eps_final", "eps_schedule",
                         "newton_inner", "dt_safety", "diagnostics_every", "progress_every"}),
                c.solver);
  }
  if (root.has("extract")) {
    const Section s(root.at("extract"), "extract", {"level_factor", "plane_threshold", "coincidence_tol"});
    s.get("level_factor", c.extract.level_factor);
    s.get("plane_threshold", c.extract.plane_threshold);
    s.get("coincidence_tol", c.extract.coincidence_tol);
  }
  if (root.has("verify")) {
    read_verify(Section(root.at("verify"), "verify",
                        {"theta0", "cone_slack_factor", "support_min_factor", "uy_slack_factor", "collar_factor",
                         "bands", "band_tol", "exponent_lo", "exponent_hi", "coef_lo", "coef_hi", "d_max",
                         "holder_lambda", "holder_r2"}),
                c.verify);
  }
  if (root.has("slab")) {
    const Section s(root.at("slab"), "slab", {"M", "gap_tol"});
    s.get("M", c.slab.M);
    s.get("gap_tol", c.slab.gap_tol);
  }
  if (root.has("oracle")) {
    const Section s(root.at("oracle"), "oracle", {"M", "eps", "samples", "depth"});
    s.get("M", c.oracle.M);
    s.get("eps", c.oracle.eps);
    s.get("samples", c.oracle.samples);
    s.get("depth", c.oracle.depth);
  }
  if (root.has("reduce")) {
    const Section s(root.at("reduce"), "reduce", {"omega", "tol", "max_iters", "threshold", "max_cells"});
    s.get("omega", c.reduce.params.omega);
    s.get("tol", c.reduce.params.tol);
    s.get("max_iters", c.reduce.params.max_iters);
    s.get("threshold", c.reduce.threshold);
    s.get("max_cells", c.reduce.max_cells);
  }
  if (root.has("sweep")) {
    const Section s(root.at("sweep"), "sweep", {"base", "rho0", "eps0", "levels"});
    std::string base = to_string(c.sweep.base);
    s.get("base", base);
    c.sweep.base = parse_mode("sweep.base", base);
    s.get("rho0", c.sweep.rho0);
    s.get("eps0", c.sweep.eps0);
    if (s.has("levels")) {
      const json& lv = s.at("levels");
      if (!lv.is_array()) fail("sweep.levels", "must be an array of {nx, ny} objects");
      c.sweep.levels.clear();
      for (std::size_t k = 0; k < lv.size(); ++k) {
        const Section l(lv[k], "sweep.levels[" + std::to_string(k) + "]", {"nx", "ny"});
        SweepLevel level;
        if (!l.has("nx") || !l.has("ny")) fail(l.key("nx"), "nx and ny are both required");
        l.get("nx", level.nx);
        l.get("ny", level.ny);
        c.sweep.levels.push_back(level);
      }
    }
  }
  root.get("output_dir", c.output_dir);
  root.get("deterministic", c.deterministic);
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path, Mode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("<file>", std::string("not valid JSON: ") + e.what());
  }
  return parse_config(doc, mode);
}

json to_json(const RunConfig& c) {
  const auto& g = c.grid;
  const auto& s = c.solver;
  const auto& t = c.verify;
  json levels = json::array();
  for (const auto& l : c.sweep.levels) levels.push_back({{"nx", l.nx}, {"ny", l.ny}});
  return {
      {"schema_version", c.schema_version},
      {"mode", to_string(c.mode)},
      {"grid",
       {{"plane_dim", g.plane_dim},
        {"half_width", g.half_width},
        {"depth", g.depth},
        {"nx", g.nx},
        {"ny", g.ny},
        {"geometry", g.geometry == Geometry::Axisymmetric ? "axisymmetric" : "cartesian"},
        {"lateral_bc", g.lateral_bc == LateralBc::Neumann ? "neumann" : "dirichlet"}}},
      {"obstacle",
       {{"profile", c.obstacle.profile},
        {"rho0", c.obstacle.rho0},
        {"center", {c.obstacle.center[0], c.obstacle.center[1]}},
        {"value", c.obstacle.value},
        {"table", pairs_json(c.obstacle.table)},
        {"table_file", c.obstacle.table_file}}},
      {"penalty",
       {{"shape", c.penalty.shape},
        {"mass", c.penalty.mass},
        {"table", pairs_json(c.penalty.table)},
        {"table_file", c.penalty.table_file}}},
      {"solver",
       {{"method", s.method == SolveMethod::Parabolic ? "parabolic" : "psor"},
        {"omega", s.omega},
        {"tol", s.tol},
        {"max_iters", s.max_iters},
        {"eps0", s.eps0},
        {"gamma", s.gamma},
        {"eps_final", s.eps_final},
        {"eps_schedule", s.eps_schedule},
        {"newton_inner", s.newton_inner},
        {"dt_safety", s.dt_safety},
        {"diagnostics_every", s.diagnostics_every},
        {"progress_every", s.progress_every}}},
      {"extract",
       {{"level_factor", c.extract.level_factor},
        {"plane_threshold", c.extract.plane_threshold},
        {"coincidence_tol", c.extract.coincidence_tol}}},
      {"verify",
       {{"theta0", t.theta0},
        {"cone_slack_factor", t.cone_slack_factor},
        {"support_min_factor", t.support_min_factor},
        {"uy_slack_factor", t.uy_slack_factor},
        {"collar_factor", t.collar_factor},
        {"bands", t.bands},
        {"band_tol", t.band_tol},
        {"exponent_lo", t.exponent_lo},
        {"exponent_hi", t.exponent_hi},
        {"coef_lo", t.coef_lo},
        {"coef_hi", t.coef_hi},
        {"d_max", t.d_max},
        {"holder_lambda", t.holder_lambda},
        {"holder_r2", t.holder_r2}}},
      {"slab", {{"M", c.slab.M}, {"gap_tol", c.slab.gap_tol}}},
      {"oracle", {{"M", c.oracle.M}, {"eps", c.oracle.eps}, {"samples", c.oracle.samples}, {"depth", c.oracle.depth}}},
      {"reduce",
       {{"omega", c.reduce.params.omega},
        {"tol", c.reduce.params.tol},
        {"max_iters", c.reduce.params.max_iters},
        {"threshold", c.reduce.threshold},
        {"max_cells", c.reduce.max_cells}}},
      {"sweep", {{"base", to_string(c.sweep.base)}, {"rho0", c.sweep.rho0}, {"eps0", c.sweep.eps0}, {"levels", levels}}},
      {"output_dir", c.output_dir},
      {"deterministic", c.deterministic},
  };
}

ObstacleSpec make_obstacle(const RunConfig& c) {
  const auto& o = c.obstacle;
  if (o.profile == "constant") return ObstacleSpec::constant(o.value);
  if (o.profile == "custom_radial") {
    if (!o.table_file.empty()) return ObstacleSpec::custom_radial_file(o.table_file, o.rho0, o.center);
    return ObstacleSpec::custom_radial(o.table, o.rho0, o.center);
  }
  return ObstacleSpec::parabolic_skirt(o.rho0, o.center);
}

PenaltyFamily make_penalty(const RunConfig& c) {
  const auto& p = c.penalty;
  if (p.shape == "custom_table") {
    if (!p.table_file.empty()) return PenaltyFamily::custom_table_file(p.table_file, p.mass);
    return PenaltyFamily::custom_table(p.table, p.mass);
  }
  return PenaltyFamily::rational_cube(p.mass);
}

}  // namespace fbp::app
