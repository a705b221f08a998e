#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pinnreg/net.hpp"

namespace pinnreg {

/// One filter of a dense layer: an output neuron's incoming weight row and
/// its bias.
struct Filter {
  std::size_t weight_offset;
  int length;  // weights in the row
  std::size_t bias_index;
};
std::vector<Filter> filters(const NetworkArch& arch);
/// Euclidean norm of one filter's slice of a flat vector.
double filter_norm(std::span<const double> values, const Filter& f);

struct DirectionPair {
  std::vector<double> d1;
  std::vector<double> d2;
  std::uint64_t seed = 0;
  std::vector<std::size_t> zero_filters;  // filters of theta* with zero norm
};

/// Gaussian directions, orthogonalized and rescaled filter by filter so
/// that each filter slice of d1 and d2 has the norm of the matching slice
/// of theta*. Orthogonality within every filter makes d1 and d2 globally
/// orthogonal as well.
DirectionPair sample_directions(const NetworkParams& params, std::uint64_t seed);

struct LandscapeOptions {
  double half_range = 1.0;
  int resolution = 51;   // odd
  double ceiling = 10.0;  // log10 cap for saturated cells
};

struct LandscapeGrid {
  std::vector<double> alphas;
  std::vector<double> betas;
  Eigen::MatrixXd logloss;             // rows = betas, cols = alphas
  std::vector<std::uint8_t> saturated;  // row-major like logloss
  double center_loss = 0.0;
};

/// alpha_i = R (2i - (n-1)) / (n-1): exact zero at the centre, exactly
/// antisymmetric about it.
std::vector<double> landscape_axis(double half_range, int resolution);

using LossClosure = std::function<double(const NetworkParams&)>;

/// log10 of the loss at theta* + alpha d1 + beta d2 on every grid cell.
/// Non-finite or above-ceiling values are clamped to the ceiling and flagged.
LandscapeGrid evaluate_grid(const NetworkParams& params, const DirectionPair& dirs, const LossClosure& loss,
                            const LandscapeOptions& options = {});

}  // namespace pinnreg
