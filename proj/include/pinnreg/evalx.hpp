#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pinnreg/field.hpp"
#include "pinnreg/net.hpp"

namespace pinnreg {

struct FieldError {
  std::string name;
  std::optional<double> relative;  // empty when the reference field is identically zero
  double absolute = 0.0;           // root mean square of the error
};

/// Relative L2 error ||pred - ref|| / ||ref|| over every (node, snapshot)
/// sample, solid nodes excluded. Multi-field problems also get an aggregate
/// over all fields.
struct L2Report {
  std::vector<FieldError> fields;
  double relative = 0.0;
  double absolute = 0.0;
  std::size_t points = 0;
};

/// Throws DomainError when the whole reference is zero.
L2Report l2_error(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& reference,
                  const std::vector<std::string>& names);

using Predictor = std::function<Eigen::MatrixXd(const Coords&)>;
L2Report l2_error(const Predictor& predict, const SolutionField& field);
L2Report l2_error(const NetworkParams& params, const SolutionField& field);

}  // namespace pinnreg
