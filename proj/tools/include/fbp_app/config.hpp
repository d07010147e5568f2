#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbp/fb_extract.hpp"
#include "fbp/grid.hpp"
#include "fbp/obstacle.hpp"
#include "fbp/penalty.hpp"
#include "fbp/reduced_obstacle.hpp"
#include "fbp/solver.hpp"
#include "fbp/verify.hpp"

namespace fbp::app {

inline constexpr int kConfigSchemaVersion = 1;

enum class Mode { Full, Axisym, SlabTest, Reduced, Sweep, Oracle };

std::string to_string(Mode m);

struct ObstacleConfig {
  std::string profile = "parabolic_skirt";  // parabolic_skirt | custom_radial | constant
  double rho0 = 0.25;
  PlanePoint center{0.0, 0.0};
  double value = 1.0;  // constant profile
  std::vector<std::pair<double, double>> table;
  std::string table_file;
};

struct PenaltyConfig {
  std::string shape = "rational_cube";  // rational_cube | custom_table
  double mass = 0.5;
  std::vector<std::pair<double, double>> table;
  std::string table_file;
};

struct SlabConfig {
  double M = 1.0;
  double gap_tol = 5e-4;
};

struct OracleConfig {
  double M = 1.0;
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  int samples = 257;
  double depth = 0.0;  // <= 0: grid depth
};

struct ReduceConfig {
  ReducedParams params;
  double threshold = -1.0;  // negative: the threshold used for Omega
  double max_cells = 2.0;
};

struct SweepLevel {
  int nx = 0;
  int ny = 0;
};

struct SweepConfig {
  Mode base = Mode::Full;  // Full or Axisym
  std::vector<double> rho0{0.25};
  std::vector<double> eps0{0.4};
  std::vector<SweepLevel> levels;  // empty: the grid section
};

/// Validated run configuration. Every field has a default; a config file
/// only lists what it changes.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  Mode mode = Mode::Full;
  GridSpec grid;
  ObstacleConfig obstacle;
  PenaltyConfig penalty;
  SolveParams solver;
  FbOptions extract;
  VerifyTolerances verify;
  SlabConfig slab;
  OracleConfig oracle;
  ReduceConfig reduce;
  SweepConfig sweep;
  std::string output_dir = "out";
  bool deterministic = true;
};

/// Parses and validates. `mode` is the subcommand's mode; a "mode" key in
/// the document must agree with it. Errors are Error(ConfigInvalid) whose
/// message starts with the offending key path.
RunConfig parse_config(const nlohmann::json& doc, Mode mode);
RunConfig load_config(const std::string& path, Mode mode);
/// Defaults for a mode with no file.
RunConfig default_config(Mode mode);

/// Fully expanded config (every key), as echoed into manifest.json.
nlohmann::json to_json(const RunConfig& cfg);

ObstacleSpec make_obstacle(const RunConfig& cfg);
PenaltyFamily make_penalty(const RunConfig& cfg);

}  // namespace fbp::app
