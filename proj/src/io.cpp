#include "pinnreg/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pinnreg/error.hpp"

namespace pinnreg::io {

static_assert(std::endian::native == std::endian::little, "artifact I/O assumes a little-endian host");

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw ConfigError("cannot read " + path.string());
  return in;
}

double parse_double(const std::string& s, const fs::path& path) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc{} || res.ptr != e) throw ConfigError("bad number '" + s + "' in " + path.string());
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_f64(const fs::path& path, std::span<const double> values) {
  auto out = open_out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::vector<double> read_f64(const fs::path& path, std::size_t expected) {
  auto in = open_in(path, std::ios::binary);
  std::vector<double> v(expected);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(expected * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(expected * sizeof(double)) || in.peek() != EOF)
    throw ConfigError(path.string() + " does not hold " + std::to_string(expected) + " doubles");
  return v;
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

json to_json(const NetworkArch& a) {
  return {{"input_dim", a.input_dim}, {"output_dim", a.output_dim}, {"blocks", a.blocks},
          {"layers_per_block", a.layers_per_block}, {"width", a.width}, {"activation", "tanh"}};
}

NetworkArch arch_from_json(const json& j) {
  try {
    NetworkArch a;
    a.input_dim = j.at("input_dim").get<int>();
    a.output_dim = j.at("output_dim").get<int>();
    a.blocks = j.at("blocks").get<int>();
    a.layers_per_block = j.at("layers_per_block").get<int>();
    a.width = j.at("width").get<int>();
    if (j.at("activation").get<std::string>() != "tanh") throw ConfigError("unsupported activation");
    a.validate();
    return a;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad architecture record: ") + e.what());
  }
}

json to_json(const LossReport& r) {
  return {{"total", r.total},
          {"domain", r.domain},
          {"initial", r.initial},
          {"boundary", r.boundary},
          {"data", r.data},
          {"weights",
           {{"domain", r.weights.domain},
            {"initial", r.weights.initial},
            {"boundary", r.weights.boundary},
            {"data", r.weights.data}}}};
}

json to_json(const L2Report& r) {
  json fields = json::array();
  for (const auto& f : r.fields)
    fields.push_back({{"name", f.name},
                      {"relative", f.relative ? json(*f.relative) : json(nullptr)},
                      {"absolute", f.absolute}});
  return {{"relative", r.relative}, {"absolute", r.absolute}, {"points", r.points}, {"fields", fields}};
}

// ---------------------------------------------------------------------------

void write_checkpoint(const fs::path& dir, const Checkpoint& c) {
  c.params.validate();
  write_f64(dir / "checkpoint.bin", c.params.values);
  write_json(dir / "checkpoint.json", {{"format", "pinnreg-checkpoint"},
                                       {"arch", to_json(c.params.arch)},
                                       {"seed", c.seed},
                                       {"epoch", c.epoch},
                                       {"values",
                                        {{"file", "checkpoint.bin"},
                                         {"count", c.params.values.size()},
                                         {"dtype", "f64-le"}}}});
}

Checkpoint read_checkpoint(const fs::path& path) {
  const fs::path header = fs::is_directory(path) ? path / "checkpoint.json" : path;
  const json j = read_json(header);
  try {
    if (j.at("format").get<std::string>() != "pinnreg-checkpoint") throw ConfigError("not a checkpoint: " + header.string());
    Checkpoint c;
    c.params.arch = arch_from_json(j.at("arch"));
    c.seed = j.at("seed").get<std::uint64_t>();
    c.epoch = j.at("epoch").get<int>();
    const auto& v = j.at("values");
    if (v.at("dtype").get<std::string>() != "f64-le") throw ConfigError("unsupported checkpoint dtype");
    const auto count = v.at("count").get<std::size_t>();
    if (count != parameter_count(c.params.arch)) throw ConfigError("checkpoint size does not match its architecture");
    c.params.values = read_f64(header.parent_path() / v.at("file").get<std::string>(), count);
    c.params.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError("bad checkpoint header " + header.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

void write_field(const fs::path& dir, const SolutionField& field) {
  field.validate();
  json files = json::object();
  for (int f = 0; f < field.field_count(); ++f) {
    const std::string file = field.names[f] + ".bin";
    write_f64(dir / file, field.values[f]);
    files[field.names[f]] = file;
  }
  if (!field.solid.empty()) {
    auto out = open_out(dir / "solid.bin", std::ios::binary);
    out.write(reinterpret_cast<const char*>(field.solid.data()), static_cast<std::streamsize>(field.solid.size()));
  }
  write_json(dir / "manifest.json", {{"format", "pinnreg-field"},
                                     {"grid", field.grid},
                                     {"times", field.times},
                                     {"names", field.names},
                                     {"files", files},
                                     {"layout", "[time][y][x], x fastest"},
                                     {"dtype", "f64-le"},
                                     {"solid", field.solid.empty() ? json(nullptr) : json("solid.bin")},
                                     {"meta",
                                      {{"solver", field.meta.solver},
                                       {"resolution", field.meta.resolution},
                                       {"dt", field.meta.dt}}}});

  std::vector<std::size_t> snaps;
  for (double t : {0.0, 0.5 * field.times.back(), field.times.back()}) {
    const std::size_t s = field.snapshot_at(t);
    if (snaps.empty() || snaps.back() != s) snaps.push_back(s);
  }
  std::string csv = field.spatial_dim() == 1 ? "x,t" : "x,y,t";
  for (const auto& n : field.names) csv += "," + n;
  csv += '\n';
  std::vector<double> coord(field.spatial_dim() + 1);
  for (std::size_t s : snaps)
    for (std::size_t node = 0; node < field.nodes(); ++node) {
      if (field.is_solid(node)) continue;
      field.coordinates(s, node, coord);
      for (std::size_t k = 0; k < coord.size(); ++k) csv += (k ? "," : "") + format_double(coord[k]);
      for (int f = 0; f < field.field_count(); ++f) csv += "," + format_double(field.values[f][field.offset(s, node)]);
      csv += '\n';
    }
  write_text(dir / "field.csv", csv);
}

SolutionField read_field(const fs::path& dir) {
  const json j = read_json(dir / "manifest.json");
  try {
    if (j.at("format").get<std::string>() != "pinnreg-field") throw ConfigError("not a field manifest: " + dir.string());
    SolutionField f;
    f.grid = j.at("grid").get<std::vector<std::vector<double>>>();
    f.times = j.at("times").get<std::vector<double>>();
    f.names = j.at("names").get<std::vector<std::string>>();
    f.meta.solver = j.at("meta").at("solver").get<std::string>();
    f.meta.resolution = j.at("meta").at("resolution").get<std::vector<int>>();
    f.meta.dt = j.at("meta").at("dt").get<double>();
    for (const auto& n : f.names)
      f.values.push_back(read_f64(dir / j.at("files").at(n).get<std::string>(), f.nodes() * f.snapshots()));
    if (!j.at("solid").is_null()) {
      auto in = open_in(dir / j.at("solid").get<std::string>(), std::ios::binary);
      f.solid.resize(f.nodes());
      in.read(reinterpret_cast<char*>(f.solid.data()), static_cast<std::streamsize>(f.solid.size()));
      if (in.gcount() != static_cast<std::streamsize>(f.solid.size())) throw ConfigError("truncated solid mask");
    }
    f.validate();
    return f;
  } catch (const json::exception& e) {
    throw ConfigError("bad field manifest in " + dir.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

void write_regulator_csv(const fs::path& path, const RegulatorSet& set, const std::vector<std::string>& names) {
  if (static_cast<std::size_t>(set.targets.cols()) != names.size()) throw DimensionError("regulator names do not match targets");
  std::string csv = set.points.cols() == 2 ? "x,t" : "x,y,t";
  for (const auto& n : names) csv += "," + n;
  csv += '\n';
  for (Eigen::Index i = 0; i < set.points.rows(); ++i) {
    for (Eigen::Index k = 0; k < set.points.cols(); ++k) csv += (k ? "," : "") + format_double(set.points(i, k));
    for (Eigen::Index k = 0; k < set.targets.cols(); ++k) csv += "," + format_double(set.targets(i, k));
    csv += '\n';
  }
  write_text(path, csv);
}

RegulatorSet read_regulator_csv(const fs::path& path, int input_dim, RegulatorKind kind, double weight) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty regulator file " + path.string());
  const auto header = split_csv(line);
  const int outputs = static_cast<int>(header.size()) - input_dim;
  if (outputs < 1) throw ConfigError("regulator file " + path.string() + " has too few columns");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw ConfigError("ragged row in " + path.string());
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(parse_double(c, path));
    rows.push_back(std::move(r));
  }
  RegulatorSet set{Coords(rows.size(), input_dim), Eigen::MatrixXd(rows.size(), outputs), kind, weight};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < input_dim; ++k) set.points(i, k) = rows[i][k];
    for (int k = 0; k < outputs; ++k) set.targets(i, k) = rows[i][input_dim + k];
  }
  set.validate();
  return set;
}

void write_history_csv(const fs::path& path, const std::vector<HistoryRow>& history) {
  std::string csv = "epoch,total,domain,initial,boundary,data,lr\n";
  for (const auto& h : history) {
    const auto& r = h.report;
    csv += std::to_string(h.epoch);
    for (double v : {r.total, r.domain, r.initial, r.boundary, r.data, h.lr}) csv += "," + format_double(v);
    csv += '\n';
  }
  write_text(path, csv);
}

void write_landscape(const fs::path& dir, const LandscapeGrid& grid, const json& meta) {
  std::string csv = "beta\\alpha";
  for (double a : grid.alphas) csv += "," + format_double(a);
  csv += '\n';
  for (std::size_t j = 0; j < grid.betas.size(); ++j) {
    csv += format_double(grid.betas[j]);
    for (std::size_t i = 0; i < grid.alphas.size(); ++i) csv += "," + format_double(grid.logloss(j, i));
    csv += '\n';
  }
  write_text(dir / "grid.csv", csv);

  json m = meta;
  m["center_loss"] = grid.center_loss;
  m["resolution"] = grid.alphas.size();
  m["half_range"] = grid.alphas.back();
  std::size_t saturated = 0;
  for (auto s : grid.saturated) saturated += s;
  m["saturated_cells"] = saturated;
  json flagged = json::array();
  for (std::size_t k = 0; k < grid.saturated.size(); ++k)
    if (grid.saturated[k]) flagged.push_back({k / grid.alphas.size(), k % grid.alphas.size()});
  m["saturated"] = flagged;
  write_json(dir / "meta.json", m);
}

}  // namespace pinnreg::io
