#include "pinnreg/field.hpp"

#include <algorithm>
#include <cmath>

#include "pinnreg/error.hpp"

namespace pinnreg {

std::size_t SolutionField::nodes() const {
  std::size_t n = 1;
  for (const auto& axis : grid) n *= axis.size();
  return n;
}

void SolutionField::coordinates(std::size_t snapshot, std::size_t node, std::span<double> out) const {
  const std::size_t nx = grid[0].size();
  out[0] = grid[0][node % nx];
  if (spatial_dim() > 1) out[1] = grid[1][node / nx];
  out[spatial_dim()] = times[snapshot];
}

std::size_t SolutionField::snapshot_at(double t) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - t) < std::abs(times[best] - t)) best = i;
  return best;
}

void SolutionField::validate() const {
  if (grid.empty() || grid.size() > 2) throw DimensionError("field must have 1 or 2 spatial axes");
  for (const auto& axis : grid) {
    if (axis.size() < 2) throw DimensionError("field axis needs at least two nodes");
    for (std::size_t i = 1; i < axis.size(); ++i)
      if (!(axis[i] > axis[i - 1])) throw DimensionError("field axis not strictly increasing");
  }
  if (times.empty() || times.front() != 0.0) throw DimensionError("field snapshots must start at t = 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DimensionError("field snapshot times not increasing");
  if (values.size() != names.size()) throw DimensionError("field names and value arrays disagree");
  for (const auto& v : values) {
    if (v.size() != nodes() * snapshots()) throw DimensionError("field value array has the wrong length");
    for (double x : v)
      if (!std::isfinite(x)) throw NumericalError("non-finite value in solution field");
  }
  if (!solid.empty() && solid.size() != nodes()) throw DimensionError("solid mask has the wrong length");
}

namespace {

struct Bracket {
  std::size_t lo;
  double w;  // weight of lo + 1
};

Bracket locate(const std::vector<double>& axis, double x) {
  if (!(x >= axis.front() && x <= axis.back())) throw DomainError("point outside the field hull");
  if (x == axis.back()) return {axis.size() - 2, 1.0};
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  const std::size_t lo = hi - 1;
  return {lo, (x - axis[lo]) / (axis[hi] - axis[lo])};
}

}  // namespace

Eigen::MatrixXd sample_field(const SolutionField& field, const Coords& points) {
  const int D = field.spatial_dim();
  if (points.cols() != D + 1) throw DimensionError("sample points need spatial coordinates plus t");
  Eigen::MatrixXd out(points.rows(), field.field_count());
  const std::size_t nx = field.grid[0].size();
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Bracket bt = locate(field.times, points(i, D));
    const Bracket bx = locate(field.grid[0], points(i, 0));
    const Bracket by = D > 1 ? locate(field.grid[1], points(i, 1)) : Bracket{0, 0.0};
    for (int f = 0; f < field.field_count(); ++f) {
      const auto& v = field.values[f];
      auto spatial = [&](std::size_t snap) {
        auto row = [&](std::size_t iy) {
          const std::size_t base = field.offset(snap, iy * nx + bx.lo);
          return (1.0 - bx.w) * v[base] + bx.w * v[base + 1];
        };
        if (D == 1) return row(0);
        return (1.0 - by.w) * row(by.lo) + by.w * row(by.lo + 1);
      };
      out(i, f) = (1.0 - bt.w) * spatial(bt.lo) + bt.w * spatial(bt.lo + 1);
    }
  }
  return out;
}

FieldSamples field_samples(const SolutionField& field, bool skip_solid) {
  const int D = field.spatial_dim();
  std::size_t count = 0;
  for (std::size_t n = 0; n < field.nodes(); ++n)
    if (!(skip_solid && field.is_solid(n))) ++count;
  count *= field.snapshots();

  FieldSamples s{Coords(count, D + 1), Eigen::MatrixXd(count, field.field_count())};
  std::vector<double> coord(D + 1);
  Eigen::Index row = 0;
  for (std::size_t t = 0; t < field.snapshots(); ++t)
    for (std::size_t n = 0; n < field.nodes(); ++n) {
      if (skip_solid && field.is_solid(n)) continue;
      field.coordinates(t, n, coord);
      for (int a = 0; a <= D; ++a) s.points(row, a) = coord[a];
      for (int f = 0; f < field.field_count(); ++f) s.values(row, f) = field.values[f][field.offset(t, n)];
      ++row;
    }
  return s;
}

}  // namespace pinnreg
