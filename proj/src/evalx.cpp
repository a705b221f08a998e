#include "pinnreg/evalx.hpp"

#include <algorithm>
#include <cmath>

#include "pinnreg/error.hpp"

namespace pinnreg {

L2Report l2_error(const Eigen::MatrixXd& predicted, const Eigen::MatrixXd& reference,
                  const std::vector<std::string>& names) {
  if (predicted.rows() != reference.rows() || predicted.cols() != reference.cols())
    throw DimensionError("prediction and reference shapes differ");
  if (static_cast<std::size_t>(reference.cols()) != names.size())
    throw DimensionError("field name count does not match the reference");
  if (reference.rows() == 0) throw DomainError("empty reference");

  L2Report out;
  out.points = static_cast<std::size_t>(reference.rows());
  double err_total = 0.0, ref_total = 0.0;
  for (Eigen::Index f = 0; f < reference.cols(); ++f) {
    double err = 0.0, ref = 0.0;
    for (Eigen::Index i = 0; i < reference.rows(); ++i) {
      const double d = predicted(i, f) - reference(i, f);
      err += d * d;
      ref += reference(i, f) * reference(i, f);
    }
    FieldError fe{names[f], std::nullopt, std::sqrt(err / reference.rows())};
    if (ref > 0.0) fe.relative = std::sqrt(err / ref);
    out.fields.push_back(fe);
    err_total += err;
    ref_total += ref;
  }
  if (!(ref_total > 0.0)) throw DomainError("reference field has zero norm");
  out.relative = std::sqrt(err_total / ref_total);
  out.absolute = std::sqrt(err_total / (reference.rows() * reference.cols()));
  return out;
}

L2Report l2_error(const Predictor& predict, const SolutionField& field) {
  const FieldSamples s = field_samples(field, true);
  return l2_error(predict(s.points), s.values, field.names);
}

L2Report l2_error(const NetworkParams& params, const SolutionField& field) {
  if (params.arch.output_dim != field.field_count() || params.arch.input_dim != field.spatial_dim() + 1)
    throw DimensionError("network does not match the field");
  return l2_error(
      [&](const Coords& x) {
        constexpr Eigen::Index kChunk = 8192;
        Eigen::MatrixXd out(x.rows(), params.arch.output_dim);
        for (Eigen::Index s = 0; s < x.rows(); s += kChunk) {
          const Eigen::Index n = std::min(kChunk, x.rows() - s);
          out.middleRows(s, n) = forward(params, x.middleRows(s, n));
        }
        return out;
      },
      field);
}

}  // namespace pinnreg
