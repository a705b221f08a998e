#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinnreg/landscape.hpp"
#include "pinnreg/net.hpp"
#include "pinnreg/pde.hpp"
#include "pinnreg/sampling.hpp"
#include "pinnreg/solvers.hpp"
#include "pinnreg/train.hpp"

namespace pinnreg {

struct RegulatorConfig {
  std::string kind = "none";  // none | sparse | coarse | line_probe | file
  double fraction = 0.01;
  double weight = 0.0;  // 0: the kind's default (coarse 0.5, others 1.0)
  int stride = 10;
  std::vector<double> x_positions;  // empty: 1.5 before and after the block
  std::uint64_t seed = 0;
  std::string file;  // CSV for kind = file

  double effective_weight() const;
};

struct LandscapeConfig {
  LandscapeOptions grid;
  std::uint64_t seed = 0;
  PointBudget budget{16384, 1024, 1024};
};

/// Everything one experiment needs. Sections of the INI file:
/// [problem] [reference] [network] [train] [regulator] [landscape] [output].
struct ExperimentConfig {
  PdeProblem problem;
  BurgersSolverOptions burgers;
  WaveSolverOptions wave;
  NsSolverOptions ns;
  int coarse_factor = 10;
  int coarse_snapshots = 11;
  std::string reference_dir;  // reuse a stored reference instead of solving
  NetworkArch arch;
  TrainConfig train;
  RegulatorConfig regulator;
  LandscapeConfig landscape;
  std::string out_dir = "runs/default";

  /// Resolution of the chosen problem's oracle as "points per axis".
  std::vector<int> reference_resolution() const;
  void validate() const;
};

/// Defaults for a problem kind.
ExperimentConfig default_config(ProblemKind kind);

/// Parses an INI file; unknown sections or keys, malformed values and
/// inconsistent settings throw ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

/// Coarse-mesh solver options derived from the fine NS options.
NsSolverOptions coarse_ns_options(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace pinnreg
