#include "pinnreg/train.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pinnreg/error.hpp"
#include "pinnreg/rng.hpp"

namespace pinnreg {

std::string to_string(ResampleMode mode) { return mode == ResampleMode::fixed ? "fixed" : "per_epoch"; }

ResampleMode resample_mode_from_string(const std::string& name) {
  if (name == "per_epoch") return ResampleMode::per_epoch;
  if (name == "fixed") return ResampleMode::fixed;
  throw ConfigError("unknown resample mode '" + name + "'");
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(lr0 > 0.0)) throw ConfigError("lr0 must be positive");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (step_every < 1) throw ConfigError("step_every must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("Adam betas must lie in [0, 1)");
  if (!(eps > 0.0)) throw ConfigError("Adam eps must be positive");
  if (snapshot_every < 0 || wane_epochs < 0) throw ConfigError("negative epoch interval");
  if (budget.interior == 0) throw ConfigError("interior point budget must be positive");
}

double learning_rate(const TrainConfig& config, int epoch) {
  return config.lr0 * std::pow(config.gamma, epoch / config.step_every);
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  if (params.size() != grads.size()) throw DimensionError("Adam parameter and gradient sizes differ");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
    params[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + eps);
  }
}

NetworkArch default_arch(const PdeProblem& problem) {
  NetworkArch arch;
  arch.input_dim = problem.input_dim();
  arch.output_dim = problem.output_dim();
  return arch;
}

TrainResult train(const PdeProblem& problem, const NetworkArch& arch,
                  const std::optional<RegulatorSet>& regulator, const TrainConfig& config,
                  const CheckpointSink& checkpoint) {
  config.validate();
  arch.validate();
  if (arch.input_dim != problem.input_dim() || arch.output_dim != problem.output_dim())
    throw DimensionError("network architecture does not match the problem");

  TrainResult result{init_params(arch, config.seed), {}};
  result.history.reserve(static_cast<std::size_t>(config.epochs));
  const std::uint64_t sample_seed = mix_seed(config.seed, 0x9e3779b97f4a7c15ULL);
  AdamState adam;
  NetworkParams last_good = result.params;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const std::uint64_t batch = config.resample == ResampleMode::per_epoch ? static_cast<std::uint64_t>(epoch) : 0;
    TrainSet set = make_train_set(problem, config.budget, sample_seed, batch);
    set.regulator = regulator;
    LossWeights w = config.weights;
    if (config.wane_epochs > 0)
      w.data *= std::max(0.0, 1.0 - static_cast<double>(epoch) / config.wane_epochs);

    LossEvaluator::WithGradient eval;
    try {
      eval = LossEvaluator(problem, set, w).evaluate_with_gradient(result.params);
      for (double g : eval.gradient)
        if (!std::isfinite(g)) throw NumericalError("non-finite gradient");
    } catch (const NumericalError& e) {
      if (checkpoint) checkpoint(last_good, std::max(0, epoch - 1), CheckpointReason::abort);
      throw NumericalError("epoch " + std::to_string(epoch) + ": " + e.what());
    }

    last_good.values = result.params.values;
    const double lr = learning_rate(config, epoch);
    result.history.push_back({epoch, eval.report, lr});
    adam_step(result.params.values, eval.gradient, adam, lr, config.beta1, config.beta2, config.eps);

    if (config.snapshot_every > 0 && (epoch + 1) % config.snapshot_every == 0 && checkpoint)
      checkpoint(result.params, epoch + 1, CheckpointReason::snapshot);
  }
  return result;
}

}  // namespace pinnreg
