#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "pinnreg/config.hpp"
#include "pinnreg/field.hpp"
#include "pinnreg/sampling.hpp"

// Run orchestration behind the command-line front end. Every run directory
// holds config.ini (the effective configuration), manifest.json,
// history.csv, checkpoint/, fields/{reference,coarse,pinn}/, regulator.csv
// and landscape/.
namespace pinnreg {

namespace fs = std::filesystem;

SolutionField solve_reference(const ExperimentConfig& config);
/// NS solve on the mesh coarse_factor times coarser per axis.
SolutionField solve_coarse_reference(const ExperimentConfig& config);

/// Probe lines 1.5 before and after the block (or at 1/4 and 3/4 of the
/// x range when there is none).
std::vector<double> default_probe_positions(const PdeProblem& problem);

/// Regulator for the configured kind; `coarse` is needed only for kind coarse.
std::optional<RegulatorSet> build_regulator(const ExperimentConfig& config, const SolutionField& reference,
                                            const SolutionField* coarse);

/// The frozen point set used for final losses and landscapes.
TrainSet evaluation_set(const ExperimentConfig& config, const std::optional<RegulatorSet>& regulator);

/// The network evaluated on the grid and snapshots of `like`.
SolutionField predict_field(const NetworkParams& params, const SolutionField& like);

/// Canonical INI text; parse_config(config_to_ini(c)) reproduces c.
std::string config_to_ini(const ExperimentConfig& config);

struct ReferenceOptions {
  int coarse_factor = 0;  // > 0: write only the coarse field at this factor
};
/// Writes fields/reference (or fields/coarse) under the output directory.
fs::path run_reference(const ExperimentConfig& config, const ReferenceOptions& options = {});

/// Full training run; returns the manifest. Throws NumericalError after
/// writing the last good checkpoint when training diverges.
nlohmann::json run_train(const ExperimentConfig& config);

struct LandscapeRunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
  std::optional<double> half_range;
  fs::path out;  // empty: <run>/landscape
};
/// Landscape of a finished run's checkpoint on the run's evaluation set.
nlohmann::json run_landscape(const fs::path& run_dir, const LandscapeRunOptions& options = {});

/// Relative L2 of a run's checkpoint against a reference directory
/// (default: the run's own reference).
nlohmann::json run_evaluate(const fs::path& run_dir, const fs::path& reference_dir = {});

}  // namespace pinnreg
