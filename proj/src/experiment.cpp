#include "pinnreg/experiment.hpp"

#include "pinnreg/error.hpp"
#include "pinnreg/evalx.hpp"
#include "pinnreg/io.hpp"
#include "pinnreg/loss.hpp"
#include "pinnreg/rng.hpp"
#include "pinnreg/solvers.hpp"
#include "pinnreg/train.hpp"

namespace pinnreg {

using nlohmann::json;

SolutionField solve_reference(const ExperimentConfig& c) {
  switch (c.problem.kind) {
    case ProblemKind::burgers1d: return solve_burgers_spectral(c.problem, c.burgers);
    case ProblemKind::wave2d: return solve_wave_chebyshev(c.problem, c.wave);
    case ProblemKind::ns2d_block: return solve_ns_ftcs(c.problem, c.ns);
  }
  throw ConfigError("unknown problem");
}

SolutionField solve_coarse_reference(const ExperimentConfig& c) {
  if (c.problem.kind != ProblemKind::ns2d_block) throw ConfigError("coarse references are implemented for Navier-Stokes");
  return solve_ns_ftcs(c.problem, coarse_ns_options(c));
}

std::vector<double> default_probe_positions(const PdeProblem& problem) {
  if (problem.block) return {problem.block->x0 - 1.5, problem.block->x1 + 1.5};
  const auto& ax = problem.domain.spatial[0];
  return {ax[0] + 0.25 * (ax[1] - ax[0]), ax[0] + 0.75 * (ax[1] - ax[0])};
}

std::optional<RegulatorSet> build_regulator(const ExperimentConfig& c, const SolutionField& reference,
                                            const SolutionField* coarse) {
  const auto& r = c.regulator;
  std::optional<RegulatorSet> out;
  if (r.kind == "none") return out;
  if (r.kind == "sparse") {
    out = extract_sparse(reference, r.fraction, r.seed);
  } else if (r.kind == "coarse") {
    if (coarse == nullptr) throw ConfigError("coarse regulation needs a coarse reference");
    out = extract_coarse(*coarse);
  } else if (r.kind == "line_probe") {
    const auto xs = r.x_positions.empty() ? default_probe_positions(c.problem) : r.x_positions;
    out = extract_line_probe(reference, xs, static_cast<std::size_t>(r.stride));
  } else if (r.kind == "file") {
    out = io::read_regulator_csv(r.file, c.problem.input_dim(), RegulatorKind::sparse, 1.0);
    if (out->targets.cols() != c.problem.output_dim()) throw ConfigError("regulator file has the wrong field count");
  }
  out->weight = r.effective_weight();
  out->validate();
  return out;
}

TrainSet evaluation_set(const ExperimentConfig& c, const std::optional<RegulatorSet>& regulator) {
  TrainSet set = make_train_set(c.problem, c.landscape.budget, mix_seed(c.train.seed, 0xe7a1), 0);
  set.regulator = regulator;
  return set;
}

SolutionField predict_field(const NetworkParams& params, const SolutionField& like) {
  SolutionField out = like;
  out.meta.solver = "pinn";
  const FieldSamples s = field_samples(like, false);
  constexpr Eigen::Index kChunk = 8192;
  for (Eigen::Index start = 0; start < s.points.rows(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, s.points.rows() - start);
    const Eigen::MatrixXd y = forward(params, s.points.middleRows(start, n));
    for (Eigen::Index i = 0; i < n; ++i)
      for (int f = 0; f < out.field_count(); ++f) out.values[f][start + i] = y(i, f);
  }
  return out;
}

std::string config_to_ini(const ExperimentConfig& c) {
  const auto d = [](double v) { return io::format_double(v); };
  const PdeProblem& p = c.problem;
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };

  s += "[problem]\n";
  line("kind", to_string(p.kind));
  line("nu", d(p.constants.nu));
  line("rho", d(p.constants.rho));
  line("c", d(p.constants.c));
  line("re", d(p.constants.re));
  line("t_end", d(p.domain.time[1]));
  line("third_order", b(p.burgers_third_order));
  line("wave_center_x", d(p.wave_center[0]));
  line("wave_center_y", d(p.wave_center[1]));
  line("wave_width", d(p.wave_width));
  line("inflow", d(p.inflow));
  line("block", b(p.block.has_value()));
  if (p.block) {
    line("block_x0", d(p.block->x0));
    line("block_x1", d(p.block->x1));
    line("block_y0", d(p.block->y0));
    line("block_y1", d(p.block->y1));
  }
  line("start", p.ns_start == NsStart::rest ? "rest" : "uniform");

  s += "\n[reference]\n";
  switch (p.kind) {
    case ProblemKind::burgers1d:
      line("resolution", std::to_string(c.burgers.resolution));
      line("dt", d(c.burgers.dt));
      line("snapshots", std::to_string(c.burgers.snapshots.count));
      break;
    case ProblemKind::wave2d:
      line("resolution", std::to_string(c.wave.resolution));
      line("dt", d(c.wave.dt));
      line("snapshots", std::to_string(c.wave.snapshots.count));
      break;
    case ProblemKind::ns2d_block:
      line("nx", std::to_string(c.ns.nx));
      line("ny", std::to_string(c.ns.ny));
      line("dt", d(c.ns.dt));
      line("snapshots", std::to_string(c.ns.snapshots.count));
      line("max_sweeps", std::to_string(c.ns.max_sweeps));
      line("poisson_tol", d(c.ns.poisson_tol));
      line("divergence_source", b(c.ns.divergence_source));
      break;
  }
  line("coarse_factor", std::to_string(c.coarse_factor));
  line("coarse_snapshots", std::to_string(c.coarse_snapshots));
  if (!c.reference_dir.empty()) line("dir", c.reference_dir);

  s += "\n[network]\n";
  line("blocks", std::to_string(c.arch.blocks));
  line("layers_per_block", std::to_string(c.arch.layers_per_block));
  line("width", std::to_string(c.arch.width));

  const TrainConfig& t = c.train;
  s += "\n[train]\n";
  line("epochs", std::to_string(t.epochs));
  line("lr0", d(t.lr0));
  line("gamma", d(t.gamma));
  line("step_every", std::to_string(t.step_every));
  line("beta1", d(t.beta1));
  line("beta2", d(t.beta2));
  line("eps", d(t.eps));
  line("seed", std::to_string(t.seed));
  line("snapshot_every", std::to_string(t.snapshot_every));
  line("resample", to_string(t.resample));
  line("interior", std::to_string(t.budget.interior));
  line("initial", std::to_string(t.budget.initial));
  line("boundary", std::to_string(t.budget.boundary));
  line("weight_domain", d(t.weights.domain));
  line("weight_initial", d(t.weights.initial));
  line("weight_boundary", d(t.weights.boundary));
  line("weight_data", d(t.weights.data));
  line("wane_epochs", std::to_string(t.wane_epochs));

  s += "\n[regulator]\n";
  line("kind", c.regulator.kind);
  line("fraction", d(c.regulator.fraction));
  line("weight", d(c.regulator.weight));
  line("stride", std::to_string(c.regulator.stride));
  if (!c.regulator.x_positions.empty()) {
    std::string xs;
    for (double x : c.regulator.x_positions) xs += (xs.empty() ? "" : ", ") + d(x);
    line("x_positions", xs);
  }
  line("seed", std::to_string(c.regulator.seed));
  if (!c.regulator.file.empty()) line("file", c.regulator.file);

  s += "\n[landscape]\n";
  line("half_range", d(c.landscape.grid.half_range));
  line("resolution", std::to_string(c.landscape.grid.resolution));
  line("ceiling", d(c.landscape.grid.ceiling));
  line("seed", std::to_string(c.landscape.seed));
  line("interior", std::to_string(c.landscape.budget.interior));
  line("initial", std::to_string(c.landscape.budget.initial));
  line("boundary", std::to_string(c.landscape.budget.boundary));

  s += "\n[output]\n";
  line("dir", c.out_dir);
  return s;
}

// ---------------------------------------------------------------------------

fs::path run_reference(const ExperimentConfig& c, const ReferenceOptions& options) {
  c.validate();
  const fs::path out = c.out_dir;
  if (options.coarse_factor > 0) {
    ExperimentConfig cc = c;
    cc.coarse_factor = options.coarse_factor;
    const fs::path dir = out / "fields" / "coarse";
    io::write_field(dir, solve_coarse_reference(cc));
    return dir;
  }
  const fs::path dir = out / "fields" / "reference";
  io::write_field(dir, solve_reference(c));
  return dir;
}

json run_train(const ExperimentConfig& c) {
  c.validate();
  const fs::path out = c.out_dir;
  fs::create_directories(out);
  io::write_text(out / "config.ini", config_to_ini(c));

  SolutionField reference;
  if (!c.reference_dir.empty()) {
    reference = io::read_field(c.reference_dir);
  } else {
    reference = solve_reference(c);
    io::write_field(out / "fields" / "reference", reference);
  }
  if (reference.field_count() != c.problem.output_dim() || reference.spatial_dim() != c.problem.spatial_dim())
    throw ConfigError("reference field does not match the problem");

  std::optional<SolutionField> coarse;
  if (c.regulator.kind == "coarse") {
    coarse = solve_coarse_reference(c);
    io::write_field(out / "fields" / "coarse", *coarse);
  }
  const auto regulator = build_regulator(c, reference, coarse ? &*coarse : nullptr);
  if (regulator)
    io::write_regulator_csv(out / "regulator.csv", *regulator, c.problem.field_names());
  else
    fs::remove(out / "regulator.csv");

  json manifest = {{"format", "pinnreg-run"},
                   {"config", to_json(c)},
                   {"parameters", parameter_count(c.arch)},
                   {"reference", {{"solver", reference.meta.solver}, {"resolution", reference.meta.resolution}}},
                   {"regulator", {{"kind", c.regulator.kind}, {"points", regulator ? regulator->size() : 0}}}};

  auto sink = [&](const NetworkParams& params, int epoch, CheckpointReason reason) {
    const fs::path dir = reason == CheckpointReason::abort
                             ? out / "checkpoint"
                             : out / "checkpoints" / ("epoch_" + std::to_string(epoch));
    io::write_checkpoint(dir, {params, c.train.seed, epoch});
  };

  TrainResult result;
  try {
    result = train(c.problem, c.arch, regulator, c.train, sink);
  } catch (const NumericalError& e) {
    manifest["status"] = "aborted";
    manifest["error"] = e.what();
    io::write_json(out / "manifest.json", manifest);
    throw;
  }

  io::write_checkpoint(out / "checkpoint", {result.params, c.train.seed, c.train.epochs});
  io::write_history_csv(out / "history.csv", result.history);
  io::write_field(out / "fields" / "pinn", predict_field(result.params, reference));

  const TrainSet eval = evaluation_set(c, regulator);
  const LossReport final_loss = LossEvaluator(c.problem, eval, c.train.weights).evaluate(result.params);
  manifest["status"] = "complete";
  manifest["final_loss"] = io::to_json(final_loss);
  manifest["last_epoch_loss"] = io::to_json(result.history.back().report);
  manifest["l2"] = io::to_json(l2_error(result.params, reference));
  io::write_json(out / "manifest.json", manifest);
  return manifest;
}

namespace {

struct LoadedRun {
  ExperimentConfig config;
  io::Checkpoint checkpoint;
  std::optional<RegulatorSet> regulator;
};

LoadedRun load_run(const fs::path& run_dir) {
  LoadedRun run{load_config(run_dir / "config.ini"), io::read_checkpoint(run_dir / "checkpoint"), std::nullopt};
  if (run.checkpoint.params.arch != run.config.arch)
    throw ConfigError("checkpoint architecture does not match the run configuration");
  if (fs::exists(run_dir / "regulator.csv"))
    run.regulator = io::read_regulator_csv(run_dir / "regulator.csv", run.config.problem.input_dim(),
                                           regulator_kind_from_string(run.config.regulator.kind == "file"
                                                                          ? "sparse"
                                                                          : run.config.regulator.kind),
                                           run.config.regulator.effective_weight());
  return run;
}

}  // namespace

json run_landscape(const fs::path& run_dir, const LandscapeRunOptions& options) {
  const LoadedRun run = load_run(run_dir);
  const ExperimentConfig& c = run.config;
  LandscapeOptions grid_opts = c.landscape.grid;
  if (options.resolution) grid_opts.resolution = *options.resolution;
  if (options.half_range) grid_opts.half_range = *options.half_range;
  const std::uint64_t seed = options.seed.value_or(c.landscape.seed);

  const LossEvaluator evaluator(c.problem, evaluation_set(c, run.regulator), c.train.weights);
  const DirectionPair dirs = sample_directions(run.checkpoint.params, seed);
  const LandscapeGrid grid = evaluate_grid(
      run.checkpoint.params, dirs, [&](const NetworkParams& p) { return evaluator.evaluate(p).total; }, grid_opts);

  const json meta = {{"format", "pinnreg-landscape"},
                     {"seed", seed},
                     {"ceiling", grid_opts.ceiling},
                     {"normalization", "filter"},
                     {"evaluation_points",
                      {c.landscape.budget.interior, c.landscape.budget.initial, c.landscape.budget.boundary}},
                     {"zero_filters", dirs.zero_filters.size()},
                     {"checkpoint_epoch", run.checkpoint.epoch}};
  const fs::path out = options.out.empty() ? run_dir / "landscape" : options.out;
  io::write_landscape(out, grid, meta);
  return io::read_json(out / "meta.json");
}

json run_evaluate(const fs::path& run_dir, const fs::path& reference_dir) {
  const LoadedRun run = load_run(run_dir);
  const fs::path ref_dir = !reference_dir.empty()         ? reference_dir
                           : !run.config.reference_dir.empty() ? fs::path(run.config.reference_dir)
                                                               : run_dir / "fields" / "reference";
  const SolutionField reference = io::read_field(ref_dir);
  json out = {{"format", "pinnreg-evaluation"},
              {"reference", ref_dir.lexically_normal().generic_string()},
              {"l2", io::to_json(l2_error(run.checkpoint.params, reference))}};
  io::write_json(run_dir / "evaluation.json", out);
  return out;
}

}  // namespace pinnreg
