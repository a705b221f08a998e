#include "pinnreg/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pinnreg/error.hpp"

namespace pinnreg {

namespace pt = boost::property_tree;

double RegulatorConfig::effective_weight() const {
  if (weight > 0.0) return weight;
  return kind == "coarse" ? 0.5 : 1.0;
}

std::vector<int> ExperimentConfig::reference_resolution() const {
  switch (problem.kind) {
    case ProblemKind::burgers1d: return {burgers.resolution};
    case ProblemKind::wave2d: return {wave.resolution, wave.resolution};
    case ProblemKind::ns2d_block: return {ns.nx, ns.ny};
  }
  return {};
}

void ExperimentConfig::validate() const {
  problem.domain.validate();
  arch.validate();
  train.validate();
  if (arch.input_dim != problem.input_dim() || arch.output_dim != problem.output_dim())
    throw ConfigError("network dimensions do not match the problem");
  static const std::set<std::string> kinds{"none", "sparse", "coarse", "line_probe", "file"};
  if (!kinds.count(regulator.kind)) throw ConfigError("unknown regulator kind '" + regulator.kind + "'");
  if (regulator.kind == "sparse" && !(regulator.fraction > 0.0 && regulator.fraction <= 1.0))
    throw ConfigError("sparse fraction must lie in (0, 1]");
  if ((regulator.kind == "coarse" || regulator.kind == "line_probe") && problem.spatial_dim() != 2)
    throw ConfigError(regulator.kind + " regulation needs a 2-D problem");
  if (regulator.kind == "coarse" && problem.kind != ProblemKind::ns2d_block)
    throw ConfigError("coarse regulation is implemented for the Navier-Stokes problem");
  if (regulator.kind == "file" && regulator.file.empty()) throw ConfigError("regulator file not set");
  if (regulator.weight < 0.0) throw ConfigError("regulator weight must be positive");
  if (regulator.stride < 1) throw ConfigError("line-probe stride must be positive");
  if (coarse_factor < 1 || coarse_snapshots < 2) throw ConfigError("bad coarse-mesh settings");
  if (landscape.grid.resolution < 1 || landscape.grid.resolution % 2 == 0)
    throw ConfigError("landscape resolution must be odd");
  if (!(landscape.grid.half_range > 0.0)) throw ConfigError("landscape half range must be positive");
  if (out_dir.empty()) throw ConfigError("output directory not set");
}

ExperimentConfig default_config(ProblemKind kind) {
  ExperimentConfig c;
  switch (kind) {
    case ProblemKind::burgers1d: c.problem = make_burgers(); break;
    case ProblemKind::wave2d: c.problem = make_wave(); break;
    case ProblemKind::ns2d_block: c.problem = make_ns(true); break;
  }
  c.arch.input_dim = c.problem.input_dim();
  c.arch.output_dim = c.problem.output_dim();
  c.train.budget = default_budget(kind);
  c.out_dir = "runs/" + to_string(kind);
  return c;
}

NsSolverOptions coarse_ns_options(const ExperimentConfig& config) {
  NsSolverOptions o = config.ns;
  o.nx = std::max(2, config.ns.nx / config.coarse_factor);
  o.ny = std::max(2, config.ns.ny / config.coarse_factor);
  o.snapshots.count = config.coarse_snapshots;
  return o;
}

namespace {

class Reader {
 public:
  explicit Reader(pt::ptree tree) : tree_(std::move(tree)) {}

  template <class T>
  void get(const std::string& section, const std::string& key, T& target) {
    consumed_.insert(section + "." + key);
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return;
    const auto value = sec->get_optional<std::string>(key);
    if (!value) return;
    try {
      target = parse<T>(*value);
    } catch (const ConfigError& e) {
      throw ConfigError("[" + section + "] " + key + ": " + e.what());
    }
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    return sec && sec->get_optional<std::string>(key);
  }

  void check_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
      for (const auto& [key, value] : body)
        if (!consumed_.count(section + "." + key)) throw ConfigError("unknown key [" + section + "] " + key);
    }
  }

 private:
  template <class T>
  static T parse(const std::string& s) {
    if constexpr (std::is_same_v<T, std::string>) {
      return s;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
      if (s == "false" || s == "no" || s == "off" || s == "0") return false;
      throw ConfigError("expected a boolean, got '" + s + "'");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      std::vector<double> out;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' ');
        const auto e = item.find_last_not_of(' ');
        if (b == std::string::npos) continue;
        out.push_back(parse<double>(item.substr(b, e - b + 1)));
      }
      return out;
    } else {
      T v{};
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError("malformed number '" + s + "'");
      return v;
    }
  }

  pt::ptree tree_;
  std::set<std::string> consumed_;
};

ExperimentConfig build(pt::ptree tree) {
  Reader r(std::move(tree));
  std::string kind = "burgers";
  r.get("problem", "kind", kind);
  ExperimentConfig c = default_config(problem_kind_from_string(kind));
  PdeProblem& p = c.problem;

  r.get("problem", "nu", p.constants.nu);
  r.get("problem", "rho", p.constants.rho);
  r.get("problem", "c", p.constants.c);
  r.get("problem", "re", p.constants.re);
  r.get("problem", "t_end", p.domain.time[1]);
  r.get("problem", "third_order", p.burgers_third_order);
  r.get("problem", "wave_center_x", p.wave_center[0]);
  r.get("problem", "wave_center_y", p.wave_center[1]);
  r.get("problem", "wave_width", p.wave_width);
  r.get("problem", "inflow", p.inflow);
  bool block = p.block.has_value();
  r.get("problem", "block", block);
  Rect rect = p.block.value_or(Rect{7.0, 9.0, 4.0, 6.0});
  r.get("problem", "block_x0", rect.x0);
  r.get("problem", "block_x1", rect.x1);
  r.get("problem", "block_y0", rect.y0);
  r.get("problem", "block_y1", rect.y1);
  if (p.kind == ProblemKind::ns2d_block) p.block = block ? std::optional<Rect>(rect) : std::nullopt;
  std::string start = "uniform";
  r.get("problem", "start", start);
  if (start == "uniform") p.ns_start = NsStart::uniform;
  else if (start == "rest") p.ns_start = NsStart::rest;
  else throw ConfigError("[problem] start must be uniform or rest");

  int resolution = p.kind == ProblemKind::wave2d ? c.wave.resolution : c.burgers.resolution;
  r.get("reference", "resolution", resolution);
  c.burgers.resolution = resolution;
  c.wave.resolution = resolution;
  r.get("reference", "nx", c.ns.nx);
  r.get("reference", "ny", c.ns.ny);
  double dt = p.kind == ProblemKind::burgers1d ? c.burgers.dt : p.kind == ProblemKind::wave2d ? c.wave.dt : c.ns.dt;
  r.get("reference", "dt", dt);
  c.burgers.dt = c.wave.dt = c.ns.dt = dt;
  int snaps = 101;
  r.get("reference", "snapshots", snaps);
  c.burgers.snapshots.count = c.wave.snapshots.count = c.ns.snapshots.count = snaps;
  r.get("reference", "max_sweeps", c.ns.max_sweeps);
  r.get("reference", "poisson_tol", c.ns.poisson_tol);
  r.get("reference", "divergence_source", c.ns.divergence_source);
  r.get("reference", "coarse_factor", c.coarse_factor);
  r.get("reference", "coarse_snapshots", c.coarse_snapshots);
  r.get("reference", "dir", c.reference_dir);

  r.get("network", "blocks", c.arch.blocks);
  r.get("network", "layers_per_block", c.arch.layers_per_block);
  r.get("network", "width", c.arch.width);

  TrainConfig& t = c.train;
  r.get("train", "epochs", t.epochs);
  r.get("train", "lr0", t.lr0);
  r.get("train", "gamma", t.gamma);
  r.get("train", "step_every", t.step_every);
  r.get("train", "beta1", t.beta1);
  r.get("train", "beta2", t.beta2);
  r.get("train", "eps", t.eps);
  r.get("train", "seed", t.seed);
  r.get("train", "snapshot_every", t.snapshot_every);
  std::string resample = to_string(t.resample);
  r.get("train", "resample", resample);
  t.resample = resample_mode_from_string(resample);
  r.get("train", "interior", t.budget.interior);
  r.get("train", "initial", t.budget.initial);
  r.get("train", "boundary", t.budget.boundary);
  r.get("train", "weight_domain", t.weights.domain);
  r.get("train", "weight_initial", t.weights.initial);
  r.get("train", "weight_boundary", t.weights.boundary);
  r.get("train", "weight_data", t.weights.data);
  r.get("train", "wane_epochs", t.wane_epochs);

  r.get("regulator", "kind", c.regulator.kind);
  if (c.regulator.kind == "line") c.regulator.kind = "line_probe";
  r.get("regulator", "fraction", c.regulator.fraction);
  r.get("regulator", "weight", c.regulator.weight);
  r.get("regulator", "stride", c.regulator.stride);
  r.get("regulator", "x_positions", c.regulator.x_positions);
  r.get("regulator", "seed", c.regulator.seed);
  r.get("regulator", "file", c.regulator.file);

  r.get("landscape", "half_range", c.landscape.grid.half_range);
  r.get("landscape", "resolution", c.landscape.grid.resolution);
  r.get("landscape", "ceiling", c.landscape.grid.ceiling);
  r.get("landscape", "seed", c.landscape.seed);
  r.get("landscape", "interior", c.landscape.budget.interior);
  r.get("landscape", "initial", c.landscape.budget.initial);
  r.get("landscape", "boundary", c.landscape.budget.boundary);

  r.get("output", "dir", c.out_dir);

  r.check_unknown();
  c.validate();
  return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return build(std::move(tree));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return build(std::move(tree));
}

nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  const PdeProblem& p = c.problem;
  json problem = {{"kind", to_string(p.kind)},
                  {"nu", p.constants.nu},
                  {"rho", p.constants.rho},
                  {"c", p.constants.c},
                  {"re", p.constants.re},
                  {"t_end", p.domain.time[1]},
                  {"third_order", p.burgers_third_order}};
  if (p.kind == ProblemKind::wave2d) {
    problem["wave_center"] = p.wave_center;
    problem["wave_width"] = p.wave_width;
  }
  if (p.kind == ProblemKind::ns2d_block) {
    problem["inflow"] = p.inflow;
    problem["start"] = p.ns_start == NsStart::rest ? "rest" : "uniform";
    problem["block"] = p.block ? json{p.block->x0, p.block->x1, p.block->y0, p.block->y1} : json(nullptr);
  }
  json reference = {{"resolution", c.reference_resolution()}, {"dir", c.reference_dir}};
  switch (p.kind) {
    case ProblemKind::burgers1d:
      reference["dt"] = c.burgers.dt;
      reference["snapshots"] = c.burgers.snapshots.count;
      break;
    case ProblemKind::wave2d:
      reference["dt"] = c.wave.dt;
      reference["snapshots"] = c.wave.snapshots.count;
      break;
    case ProblemKind::ns2d_block:
      reference["dt"] = c.ns.dt;
      reference["snapshots"] = c.ns.snapshots.count;
      reference["max_sweeps"] = c.ns.max_sweeps;
      reference["poisson_tol"] = c.ns.poisson_tol;
      reference["divergence_source"] = c.ns.divergence_source;
      reference["coarse_factor"] = c.coarse_factor;
      reference["coarse_snapshots"] = c.coarse_snapshots;
      break;
  }
  const TrainConfig& t = c.train;
  json train = {{"epochs", t.epochs},
                {"lr0", t.lr0},
                {"gamma", t.gamma},
                {"step_every", t.step_every},
                {"beta1", t.beta1},
                {"beta2", t.beta2},
                {"eps", t.eps},
                {"seed", t.seed},
                {"snapshot_every", t.snapshot_every},
                {"resample", to_string(t.resample)},
                {"budget", {t.budget.interior, t.budget.initial, t.budget.boundary}},
                {"weights", {t.weights.domain, t.weights.initial, t.weights.boundary, t.weights.data}},
                {"wane_epochs", t.wane_epochs}};
  json regulator = {{"kind", c.regulator.kind}, {"weight", c.regulator.effective_weight()}};
  if (c.regulator.kind == "sparse") {
    regulator["fraction"] = c.regulator.fraction;
    regulator["seed"] = c.regulator.seed;
  }
  if (c.regulator.kind == "line_probe") {
    regulator["stride"] = c.regulator.stride;
    regulator["x_positions"] = c.regulator.x_positions;
  }
  if (c.regulator.kind == "file") regulator["file"] = c.regulator.file;
  json landscape = {{"half_range", c.landscape.grid.half_range},
                    {"resolution", c.landscape.grid.resolution},
                    {"ceiling", c.landscape.grid.ceiling},
                    {"seed", c.landscape.seed},
                    {"budget", {c.landscape.budget.interior, c.landscape.budget.initial, c.landscape.budget.boundary}}};
  json network = {{"blocks", c.arch.blocks}, {"layers_per_block", c.arch.layers_per_block}, {"width", c.arch.width}};
  return {{"problem", problem},     {"reference", reference}, {"network", network},
          {"train", train},         {"regulator", regulator}, {"landscape", landscape},
          {"output", {{"dir", c.out_dir}}}};
}

}  // namespace pinnreg
