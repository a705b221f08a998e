#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinnreg/evalx.hpp"
#include "pinnreg/field.hpp"
#include "pinnreg/landscape.hpp"
#include "pinnreg/loss.hpp"
#include "pinnreg/net.hpp"
#include "pinnreg/sampling.hpp"
#include "pinnreg/train.hpp"

// Artifact formats. Binary arrays are raw little-endian IEEE-754 doubles
// with no header; their lengths live in the JSON next to them. Text output
// uses the shortest round-trip decimal form, so rewriting the same data
// gives identical bytes.
namespace pinnreg::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v);

void write_f64(const fs::path& path, std::span<const double> values);
std::vector<double> read_f64(const fs::path& path, std::size_t expected);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

json to_json(const NetworkArch& arch);
NetworkArch arch_from_json(const json& j);
json to_json(const LossReport& report);
json to_json(const L2Report& report);

/// checkpoint.json {format, arch, seed, epoch, values: {file, count, dtype}}
/// plus the checkpoint.bin sidecar, both inside `dir`.
struct Checkpoint {
  NetworkParams params;
  std::uint64_t seed = 0;
  int epoch = 0;
};
void write_checkpoint(const fs::path& dir, const Checkpoint& checkpoint);
/// Accepts the directory or the checkpoint.json path.
Checkpoint read_checkpoint(const fs::path& path);

/// manifest.json (grids, times, names, meta) + <name>.bin per field
/// (+ solid.bin, one byte per node) + field.csv holding every field at the
/// snapshots nearest t = 0, T/2 and T, solid nodes skipped.
void write_field(const fs::path& dir, const SolutionField& field);
SolutionField read_field(const fs::path& dir);

/// Columns: x[,y],t, then one per field.
void write_regulator_csv(const fs::path& path, const RegulatorSet& set, const std::vector<std::string>& names);
RegulatorSet read_regulator_csv(const fs::path& path, int input_dim, RegulatorKind kind, double weight);

/// epoch,total,domain,initial,boundary,data,lr
void write_history_csv(const fs::path& path, const std::vector<HistoryRow>& history);

/// grid.csv (first row: blank then alphas; then beta followed by the row)
/// plus meta.json.
void write_landscape(const fs::path& dir, const LandscapeGrid& grid, const json& meta);

}  // namespace pinnreg::io
