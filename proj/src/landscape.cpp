#include "pinnreg/landscape.hpp"

#include <cmath>

#include "pinnreg/error.hpp"
#include "pinnreg/rng.hpp"

namespace pinnreg {

std::vector<Filter> filters(const NetworkArch& arch) {
  std::vector<Filter> out;
  for (const auto& s : layer_layout(arch))
    for (int r = 0; r < s.rows; ++r)
      out.push_back({s.weight_offset + static_cast<std::size_t>(r) * s.cols, s.cols, s.bias_offset + r});
  return out;
}

double filter_norm(std::span<const double> values, const Filter& f) {
  double sum = 0.0;
  for (int k = 0; k < f.length; ++k) sum += values[f.weight_offset + k] * values[f.weight_offset + k];
  sum += values[f.bias_index] * values[f.bias_index];
  return std::sqrt(sum);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void scale_to(std::vector<double>& v, double norm) {
  const double n = std::sqrt(dot(v, v));
  for (double& x : v) x *= norm / n;
}

}  // namespace

DirectionPair sample_directions(const NetworkParams& params, std::uint64_t seed) {
  params.validate();
  DirectionPair out{std::vector<double>(params.size(), 0.0), std::vector<double>(params.size(), 0.0), seed, {}};
  Rng rng(mix_seed(seed, 0xd1d2));
  const auto fs = filters(params.arch);
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    const Filter& f = fs[fi];
    const std::size_t n = static_cast<std::size_t>(f.length) + 1;
    auto index = [&](std::size_t k) { return k < static_cast<std::size_t>(f.length) ? f.weight_offset + k : f.bias_index; };
    std::vector<double> g1(n), g2(n);
    for (double& x : g1) x = rng.normal();
    for (double& x : g2) x = rng.normal();
    const double target = filter_norm(params.values, f);
    if (target == 0.0) {
      out.zero_filters.push_back(fi);
      continue;
    }
    scale_to(g1, 1.0);
    // Two Gram-Schmidt passes keep the residual overlap at rounding level.
    for (int pass = 0; pass < 2; ++pass) {
      const double c = dot(g2, g1);
      for (std::size_t k = 0; k < n; ++k) g2[k] -= c * g1[k];
    }
    scale_to(g2, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      out.d1[index(k)] = target * g1[k];
      out.d2[index(k)] = target * g2[k];
    }
  }
  return out;
}

std::vector<double> landscape_axis(double half_range, int resolution) {
  std::vector<double> axis(static_cast<std::size_t>(resolution));
  const int m = resolution - 1;
  for (int i = 0; i < resolution; ++i) axis[i] = m == 0 ? 0.0 : half_range * (2 * i - m) / m;
  return axis;
}

LandscapeGrid evaluate_grid(const NetworkParams& params, const DirectionPair& dirs, const LossClosure& loss,
                            const LandscapeOptions& options) {
  if (options.resolution < 1 || options.resolution % 2 == 0)
    throw ConfigError("landscape resolution must be odd");
  if (!(options.half_range > 0.0)) throw ConfigError("landscape half range must be positive");
  if (dirs.d1.size() != params.size() || dirs.d2.size() != params.size())
    throw DimensionError("direction length does not match the parameters");

  LandscapeGrid grid;
  grid.alphas = landscape_axis(options.half_range, options.resolution);
  grid.betas = grid.alphas;
  const int n = options.resolution;
  grid.logloss.resize(n, n);
  grid.saturated.assign(static_cast<std::size_t>(n) * n, 0);

  NetworkParams moved = params;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double a = grid.alphas[i], b = grid.betas[j];
      for (std::size_t k = 0; k < params.size(); ++k)
        moved.values[k] = params.values[k] + a * dirs.d1[k] + b * dirs.d2[k];
      double value;
      try {
        value = std::log10(loss(moved));
      } catch (const NumericalError&) {
        value = INFINITY;
      }
      if (!std::isfinite(value) || value > options.ceiling) {
        value = options.ceiling;
        grid.saturated[static_cast<std::size_t>(j) * n + i] = 1;
      }
      grid.logloss(j, i) = value;
    }
  grid.center_loss = loss(params);
  return grid;
}

}  // namespace pinnreg
