#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pinnreg/config.hpp"
#include "pinnreg/error.hpp"
#include "pinnreg/experiment.hpp"
#include "pinnreg/runtime.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalAbort = 3;

struct Common {
  std::string config;
  std::string problem;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct Overrides {
  std::optional<int> resolution, nx, ny, epochs, stride;
  std::optional<double> fraction;
  std::string regulator, reference;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "experiment INI file");
  cmd->add_option("-p,--problem", c.problem, "burgers | wave | ns");
  cmd->add_option("-o,--out", c.out, "run directory");
  cmd->add_option("--seed", c.seed, "training seed");
}

pinnreg::ExperimentConfig make_config(const Common& common, const Overrides& o) {
  using namespace pinnreg;
  ExperimentConfig c;
  if (!common.config.empty()) {
    c = load_config(common.config);
    if (!common.problem.empty() && problem_kind_from_string(common.problem) != c.problem.kind)
      throw ConfigError("--problem disagrees with the config file");
  } else {
    c = default_config(problem_kind_from_string(common.problem.empty() ? "burgers" : common.problem));
  }
  if (!common.out.empty()) c.out_dir = common.out;
  if (common.seed) c.train.seed = *common.seed;
  if (o.resolution) c.burgers.resolution = c.wave.resolution = *o.resolution;
  if (o.nx) c.ns.nx = *o.nx;
  if (o.ny) c.ns.ny = *o.ny;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (!o.regulator.empty()) c.regulator.kind = o.regulator == "line" ? "line_probe" : o.regulator;
  if (o.fraction) c.regulator.fraction = *o.fraction;
  if (o.stride) c.regulator.stride = *o.stride;
  if (!o.reference.empty()) c.reference_dir = o.reference;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  pinnreg::tune_allocator();
  CLI::App app{"Physics-informed network training, reference solvers and loss landscapes"};
  app.require_subcommand(1);

  Common common;
  Overrides ov;

  auto* reference = app.add_subcommand("reference", "solve the configured problem numerically");
  add_common(reference, common);
  int coarse = 0;
  reference->add_option("--coarse", coarse, "write only a mesh this many times coarser per axis (NS)");
  reference->add_option("--resolution", ov.resolution, "Burgers/wave points per axis");
  reference->add_option("--nx", ov.nx, "NS points in x");
  reference->add_option("--ny", ov.ny, "NS points in y");

  auto* train = app.add_subcommand("train", "train a network and write checkpoint, history and manifest");
  add_common(train, common);
  train->add_option("--regulator", ov.regulator, "none | sparse | coarse | line_probe | file");
  train->add_option("--fraction", ov.fraction, "sparse fraction in (0, 1]");
  train->add_option("--stride", ov.stride, "line-probe snapshot stride");
  train->add_option("--epochs", ov.epochs, "training epochs");
  train->add_option("--reference", ov.reference, "reuse a stored reference field directory");
  train->add_option("--resolution", ov.resolution, "Burgers/wave reference points per axis");
  train->add_option("--nx", ov.nx, "NS reference points in x");
  train->add_option("--ny", ov.ny, "NS reference points in y");

  auto* landscape = app.add_subcommand("landscape", "loss landscape around a trained checkpoint");
  std::string run_dir;
  pinnreg::LandscapeRunOptions lopts;
  std::string landscape_out;
  landscape->add_option("run", run_dir, "run directory")->required();
  landscape->add_option("--seed", lopts.seed, "direction seed");
  landscape->add_option("--resolution", lopts.resolution, "grid points per axis (odd)");
  landscape->add_option("--range", lopts.half_range, "half range of alpha and beta");
  landscape->add_option("-o,--out", landscape_out, "output directory");

  auto* evaluate = app.add_subcommand("evaluate", "relative L2 error of a run against a reference");
  std::string eval_reference;
  evaluate->add_option("run", run_dir, "run directory")->required();
  evaluate->add_option("--reference", eval_reference, "reference field directory");

  auto* report = app.add_subcommand("report", "render figures with the Python plotting package");
  report->allow_extras();
  report->add_option("run", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*reference) {
      const auto path = pinnreg::run_reference(make_config(common, ov), {coarse});
      std::cout << "wrote " << path.generic_string() << '\n';
    } else if (*train) {
      const auto manifest = pinnreg::run_train(make_config(common, ov));
      std::cout << "final loss " << manifest["final_loss"]["total"].get<double>() << ", relative L2 "
                << manifest["l2"]["relative"].get<double>() << '\n';
    } else if (*landscape) {
      lopts.out = landscape_out;
      const auto meta = pinnreg::run_landscape(run_dir, lopts);
      std::cout << "center loss " << meta["center_loss"].get<double>() << ", saturated cells "
                << meta["saturated_cells"].get<std::size_t>() << '\n';
    } else if (*evaluate) {
      const auto out = pinnreg::run_evaluate(run_dir, eval_reference);
      std::cout << out["l2"].dump(2) << '\n';
    } else if (*report) {
      std::string cmd = "python3 -m plotview report '" + run_dir + "'";
      for (const auto& extra : report->remaining()) cmd += " '" + extra + "'";
      const int status = std::system(cmd.c_str());
      if (status != 0) {
        std::cerr << "pinnreg: report failed; the plotview package must be importable by python3\n";
        return kConfigError;
      }
    }
  } catch (const pinnreg::NumericalError& e) {
    std::cerr << "pinnreg: numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "pinnreg: " << e.what() << '\n';
    return kConfigError;
  } catch (const pinnreg::ConfigError& e) {
    std::cerr << "pinnreg: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "pinnreg: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
