#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pinnreg/net.hpp"

namespace pinnreg {

struct FieldMeta {
  std::string solver;
  std::vector<int> resolution;  // points per spatial axis
  double dt = 0.0;
};

/// Gridded reference solution. Values of each field are stored flat and
/// indexed [time][y][x] (x fastest).
struct SolutionField {
  std::vector<std::vector<double>> grid;  // per spatial axis, strictly increasing
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;  // per field
  std::vector<std::uint8_t> solid;          // per spatial node; empty when no solid region
  FieldMeta meta;

  int spatial_dim() const { return static_cast<int>(grid.size()); }
  int field_count() const { return static_cast<int>(names.size()); }
  std::size_t nodes() const;
  std::size_t snapshots() const { return times.size(); }
  std::size_t node_index(std::size_t ix, std::size_t iy = 0) const { return iy * grid[0].size() + ix; }
  std::size_t offset(std::size_t snapshot, std::size_t node) const { return snapshot * nodes() + node; }
  bool is_solid(std::size_t node) const { return !solid.empty() && solid[node] != 0; }
  /// Spatial coordinates of a node followed by t.
  void coordinates(std::size_t snapshot, std::size_t node, std::span<double> out) const;
  /// Nearest snapshot index to t (exact when t is a stored time).
  std::size_t snapshot_at(double t) const;

  /// Throws when the invariants (finite values, increasing axes, times from
  /// 0 to T) do not hold.
  void validate() const;
};

/// Multilinear interpolation in space and time; one row per point, one
/// column per field. Throws DomainError for points outside the hull.
Eigen::MatrixXd sample_field(const SolutionField& field, const Coords& points);

/// All (node, snapshot) samples, optionally skipping solid nodes, as
/// coordinates plus the stored values.
struct FieldSamples {
  Coords points;
  Eigen::MatrixXd values;
};
FieldSamples field_samples(const SolutionField& field, bool skip_solid = true);

}  // namespace pinnreg
