#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pinnreg/field.hpp"
#include "pinnreg/pde.hpp"

namespace pinnreg {

/// Points drawn per region for one training batch.
struct PointBudget {
  std::size_t interior = 4096;
  std::size_t initial = 512;
  std::size_t boundary = 512;  // periodic problems: number of (lo, hi) pairs
};

PointBudget default_budget(ProblemKind kind);

/// Scrambled Sobol points in a region of the problem's space-time domain.
/// Each region reads its own block of Sobol dimensions; the seed picks a
/// random Cranley-Patterson shift. Interior points are strictly inside
/// Omega x (0, T) and outside any solid; boundary points lie exactly on
/// the boundary (including solid faces).
Coords qmc_points(const PdeProblem& problem, std::size_t n, Region region, std::uint64_t seed);

enum class RegulatorKind { sparse, coarse, line_probe };
std::string to_string(RegulatorKind kind);
RegulatorKind regulator_kind_from_string(const std::string& name);

/// Labelled solution samples that enter the loss as a reconstruction term.
struct RegulatorSet {
  Coords points;            // (X_s, t)
  Eigen::MatrixXd targets;  // one column per field
  RegulatorKind kind = RegulatorKind::sparse;
  double weight = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  void validate() const;
};

/// floor(fraction * N) distinct (node, snapshot) samples, solid nodes
/// excluded. Draws are a prefix of one seeded permutation, so for a fixed
/// seed a smaller fraction is a subset of a larger one.
RegulatorSet extract_sparse(const SolutionField& field, double fraction, std::uint64_t seed);

/// Every node/snapshot of a coarse solve, weight 0.5.
RegulatorSet extract_coarse(const SolutionField& coarse_field, double weight = 0.5);

/// All y nodes on vertical lines x = x_positions (linear in x between grid
/// columns) at snapshots 0, stride, 2*stride, ...
RegulatorSet extract_line_probe(const SolutionField& field, const std::vector<double>& x_positions,
                                std::size_t time_stride);

struct TrainSet {
  Coords domain;
  Coords initial;
  Coords boundary;
  std::optional<RegulatorSet> regulator;
};

/// QMC batch for one epoch. With `epoch` the shift changes per epoch;
/// pass the same epoch value to hold the points fixed.
TrainSet make_train_set(const PdeProblem& problem, const PointBudget& budget, std::uint64_t seed,
                        std::uint64_t epoch);

}  // namespace pinnreg
