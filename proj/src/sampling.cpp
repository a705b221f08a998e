#include "pinnreg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/sobol.hpp>

#include "pinnreg/error.hpp"
#include "pinnreg/rng.hpp"

namespace pinnreg {

PointBudget default_budget(ProblemKind kind) {
  if (kind == ProblemKind::ns2d_block) return {8192, 1024, 1024};
  return {4096, 512, 512};
}

namespace {

using Sobol = boost::random::sobol_engine<std::uint64_t, 52>;
constexpr double kSobolScale = 0x1.0p-52;

/// Shifted Sobol stream over dims [offset, offset + dims).
class ShiftedSobol {
 public:
  ShiftedSobol(int offset, int dims, std::uint64_t seed)
      : engine_(static_cast<std::size_t>(offset + dims)), offset_(offset), shift_(dims) {
    Rng rng(seed);
    for (double& s : shift_) s = rng.uniform();
  }

  /// Next point in [0, 1)^dims, never exactly 0.
  void next(std::vector<double>& out) {
    for (int i = 0; i < offset_; ++i) engine_();
    for (std::size_t d = 0; d < shift_.size(); ++d) {
      double u = static_cast<double>(engine_()) * kSobolScale + shift_[d];
      if (u >= 1.0) u -= 1.0;
      if (u <= 0.0) u = 0x1.0p-53;
      out[d] = u;
    }
  }

 private:
  Sobol engine_;
  int offset_;
  std::vector<double> shift_;
};

struct Segment {
  double x0, y0, x1, y1;
  double length() const { return std::hypot(x1 - x0, y1 - y0); }
};

std::vector<Segment> boundary_segments(const PdeProblem& problem) {
  const auto& ax = problem.domain.spatial;
  const double xa = ax[0][0], xb = ax[0][1], ya = ax[1][0], yb = ax[1][1];
  std::vector<Segment> segs{{xa, ya, xb, ya}, {xb, ya, xb, yb}, {xa, yb, xb, yb}, {xa, ya, xa, yb}};
  if (problem.block) {
    const Rect& r = *problem.block;
    segs.push_back({r.x0, r.y0, r.x1, r.y0});
    segs.push_back({r.x1, r.y0, r.x1, r.y1});
    segs.push_back({r.x0, r.y1, r.x1, r.y1});
    segs.push_back({r.x0, r.y0, r.x0, r.y1});
  }
  return segs;
}

// Axis-aligned segments keep the fixed coordinate exact.
std::array<double, 2> point_on(const Segment& s, double frac) {
  if (s.y0 == s.y1) return {s.x0 + (s.x1 - s.x0) * frac, s.y0};
  return {s.x0, s.y0 + (s.y1 - s.y0) * frac};
}

}  // namespace

Coords qmc_points(const PdeProblem& problem, std::size_t n, Region region, std::uint64_t seed) {
  const int D = problem.spatial_dim();
  const int t_axis = problem.time_axis();
  const auto& ax = problem.domain.spatial;
  const double t_end = problem.domain.time[1];
  const std::uint64_t stream = mix_seed(seed, static_cast<std::uint64_t>(region) + 1);

  Coords pts(static_cast<Eigen::Index>(n), D + 1);
  if (n == 0) return pts;

  if (region == Region::interior || region == Region::initial) {
    const bool interior = region == Region::interior;
    const int dims = interior ? D + 1 : D;
    ShiftedSobol sobol(interior ? 0 : D + 1, dims, stream);
    std::vector<double> u(dims), x(D);
    std::size_t row = 0;
    while (row < n) {
      sobol.next(u);
      for (int a = 0; a < D; ++a) x[a] = ax[a][0] + (ax[a][1] - ax[a][0]) * u[a];
      if (!problem.is_interior(x)) continue;
      for (int a = 0; a < D; ++a) pts(row, a) = x[a];
      pts(row, t_axis) = interior ? t_end * u[D] : 0.0;
      ++row;
    }
    return pts;
  }

  if (problem.kind == ProblemKind::burgers1d) {
    // n periodic pairs.
    pts.resize(static_cast<Eigen::Index>(2 * n), 2);
    ShiftedSobol sobol(2 * D + 1, 1, stream);
    std::vector<double> u(1);
    for (std::size_t i = 0; i < n; ++i) {
      sobol.next(u);
      const double t = t_end * u[0];
      pts(2 * i, 0) = ax[0][0];
      pts(2 * i + 1, 0) = ax[0][1];
      pts(2 * i, 1) = pts(2 * i + 1, 1) = t;
    }
    return pts;
  }

  const auto segs = boundary_segments(problem);
  double total = 0.0;
  for (const auto& s : segs) total += s.length();
  ShiftedSobol sobol(2 * D + 1, 2, stream);
  std::vector<double> u(2);
  for (std::size_t i = 0; i < n; ++i) {
    sobol.next(u);
    double s = u[0] * total;
    std::size_t k = 0;
    while (k + 1 < segs.size() && s >= segs[k].length()) s -= segs[k++].length();
    const auto xy = point_on(segs[k], std::min(1.0, s / segs[k].length()));
    pts(i, 0) = xy[0];
    pts(i, 1) = xy[1];
    pts(i, 2) = t_end * u[1];
  }
  return pts;
}

// ---------------------------------------------------------------------------

std::string to_string(RegulatorKind kind) {
  switch (kind) {
    case RegulatorKind::sparse: return "sparse";
    case RegulatorKind::coarse: return "coarse";
    case RegulatorKind::line_probe: return "line_probe";
  }
  return "?";
}

RegulatorKind regulator_kind_from_string(const std::string& name) {
  if (name == "sparse") return RegulatorKind::sparse;
  if (name == "coarse") return RegulatorKind::coarse;
  if (name == "line_probe" || name == "line") return RegulatorKind::line_probe;
  throw ConfigError("unknown regulator kind '" + name + "'");
}

void RegulatorSet::validate() const {
  if (points.rows() != targets.rows()) throw DimensionError("regulator points and targets differ in count");
  if (!targets.allFinite()) throw NumericalError("non-finite regulator target");
  if (!(weight > 0.0)) throw ConfigError("regulator weight must be positive");
}

RegulatorSet extract_sparse(const SolutionField& field, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("sparse fraction must lie in (0, 1]");
  const FieldSamples all = field_samples(field, true);
  const std::size_t total = static_cast<std::size_t>(all.points.rows());
  const auto count = static_cast<std::size_t>(std::floor(fraction * total * (1.0 + 1e-12)));
  if (count == 0) throw ConfigError("sparse fraction selects zero points");

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0x5a5a));
  for (std::size_t i = 0; i + 1 < total; ++i) std::swap(order[i], order[i + rng.below(total - i)]);
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));

  RegulatorSet out{Coords(count, all.points.cols()), Eigen::MatrixXd(count, all.values.cols()),
                   RegulatorKind::sparse, 1.0};
  for (std::size_t i = 0; i < count; ++i) {
    out.points.row(i) = all.points.row(order[i]);
    out.targets.row(i) = all.values.row(order[i]);
  }
  return out;
}

RegulatorSet extract_coarse(const SolutionField& coarse_field, double weight) {
  FieldSamples all = field_samples(coarse_field, true);
  return {std::move(all.points), std::move(all.values), RegulatorKind::coarse, weight};
}

RegulatorSet extract_line_probe(const SolutionField& field, const std::vector<double>& x_positions,
                                std::size_t time_stride) {
  if (field.spatial_dim() != 2) throw DimensionError("line probes need a 2-D field");
  if (time_stride == 0) throw ConfigError("line-probe time stride must be positive");
  const auto& xs = field.grid[0];
  const auto& ys = field.grid[1];
  const std::size_t nx = xs.size();

  struct Column {
    std::size_t lo;
    double w;
    double x;
  };
  std::vector<Column> cols;
  for (double x : x_positions) {
    if (!(x >= xs.front() && x <= xs.back())) throw DomainError("line-probe x position outside the field");
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - xs.begin()), nx - 1);
    const std::size_t lo = hi - 1;
    cols.push_back({lo, (x - xs[lo]) / (xs[hi] - xs[lo]), x});
  }

  std::vector<std::array<double, 3>> pts;
  std::vector<std::vector<double>> vals;
  for (std::size_t snap = 0; snap < field.snapshots(); snap += time_stride)
    for (const auto& c : cols)
      for (std::size_t iy = 0; iy < ys.size(); ++iy) {
        const std::size_t a = field.node_index(c.lo, iy), b = field.node_index(c.lo + 1, iy);
        if (field.is_solid(a) || field.is_solid(b)) continue;
        pts.push_back({c.x, ys[iy], field.times[snap]});
        std::vector<double> row(field.field_count());
        for (int f = 0; f < field.field_count(); ++f) {
          const auto& v = field.values[f];
          row[f] = (1.0 - c.w) * v[field.offset(snap, a)] + c.w * v[field.offset(snap, b)];
        }
        vals.push_back(std::move(row));
      }

  RegulatorSet out{Coords(pts.size(), 3), Eigen::MatrixXd(pts.size(), field.field_count()),
                   RegulatorKind::line_probe, 1.0};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int a = 0; a < 3; ++a) out.points(i, a) = pts[i][a];
    for (int f = 0; f < field.field_count(); ++f) out.targets(i, f) = vals[i][f];
  }
  return out;
}

// ---------------------------------------------------------------------------

TrainSet make_train_set(const PdeProblem& problem, const PointBudget& budget, std::uint64_t seed,
                        std::uint64_t epoch) {
  const std::uint64_t s = mix_seed(seed, epoch, 0x7121);
  TrainSet set;
  set.domain = qmc_points(problem, budget.interior, Region::interior, s);
  set.initial = qmc_points(problem, budget.initial, Region::initial, s);
  set.boundary = qmc_points(problem, budget.boundary, Region::boundary, s);
  return set;
}

}  // namespace pinnreg
