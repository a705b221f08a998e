#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinnreg/loss.hpp"
#include "pinnreg/net.hpp"
#include "pinnreg/pde.hpp"
#include "pinnreg/sampling.hpp"

namespace pinnreg {

enum class ResampleMode { per_epoch, fixed };
std::string to_string(ResampleMode mode);
ResampleMode resample_mode_from_string(const std::string& name);

struct TrainConfig {
  int epochs = 20000;
  double lr0 = 1e-3;
  double gamma = 0.9;
  int step_every = 5000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  int snapshot_every = 0;  // 0: no intermediate checkpoints
  ResampleMode resample = ResampleMode::per_epoch;
  PointBudget budget;
  LossWeights weights;
  /// Regulator weight falls linearly to zero over this many epochs; 0 keeps
  /// it constant.
  int wane_epochs = 0;

  void validate() const;
};

/// lr0 * gamma^floor(epoch / step_every), epochs counted from 0.
double learning_rate(const TrainConfig& config, int epoch);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

struct HistoryRow {
  int epoch = 0;
  LossReport report;  // at the parameters the epoch's update started from
  double lr = 0.0;
};

struct TrainResult {
  NetworkParams params;
  std::vector<HistoryRow> history;
};

enum class CheckpointReason { snapshot, abort };

/// Receives the parameters after every snapshot_every epochs and, before a
/// numerical abort propagates, the last parameters with a finite loss.
/// `epoch` is the number of updates applied.
using CheckpointSink = std::function<void(const NetworkParams&, int epoch, CheckpointReason)>;

/// Adam on the composite loss. One epoch is one update on a QMC batch plus
/// the full regulator set. A non-finite loss or gradient throws
/// NumericalError naming the epoch and term.
TrainResult train(const PdeProblem& problem, const NetworkArch& arch,
                  const std::optional<RegulatorSet>& regulator, const TrainConfig& config,
                  const CheckpointSink& checkpoint = {});

/// Default network for a problem: 2 blocks of 2 layers, width 64.
NetworkArch default_arch(const PdeProblem& problem);

}  // namespace pinnreg
