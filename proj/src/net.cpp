#include "pinnreg/net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pinnreg/error.hpp"
#include "pinnreg/rng.hpp"

namespace pinnreg {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> weights_of(const NetworkParams& p, const LayerSlice& s) {
  return {p.values.data() + s.weight_offset, s.rows, s.cols};
}

Eigen::Map<const Eigen::VectorXd> bias_of(const NetworkParams& p, const LayerSlice& s) {
  return {p.values.data() + s.bias_offset, s.rows};
}

}  // namespace

void NetworkArch::validate() const {
  if (input_dim < 1 || output_dim < 1)
    throw DimensionError("network needs at least one input and one output");
  if (blocks < 1 || layers_per_block < 1 || width < 1)
    throw DimensionError("network needs blocks >= 1, layers_per_block >= 1, width >= 1");
}

std::vector<LayerSlice> layer_layout(const NetworkArch& arch) {
  arch.validate();
  std::vector<LayerSlice> out;
  std::size_t offset = 0;
  auto add = [&](int rows, int cols, bool activated) {
    LayerSlice s{offset, offset + static_cast<std::size_t>(rows) * cols, rows, cols, activated};
    offset = s.bias_offset + rows;
    out.push_back(s);
  };
  add(arch.width, arch.input_dim, true);
  for (int b = 0; b < arch.blocks; ++b)
    for (int l = 0; l < arch.layers_per_block; ++l) add(arch.width, arch.width, true);
  add(arch.output_dim, arch.width, false);
  return out;
}

std::size_t parameter_count(const NetworkArch& arch) {
  arch.validate();
  const std::size_t in = arch.input_dim, w = arch.width, out = arch.output_dim;
  const std::size_t hidden = static_cast<std::size_t>(arch.blocks) * arch.layers_per_block;
  return in * w + w + hidden * (w * w + w) + w * out + out;
}

void NetworkParams::validate() const {
  if (values.size() != parameter_count(arch))
    throw DimensionError("parameter vector has " + std::to_string(values.size()) +
                         " entries, architecture needs " +
                         std::to_string(parameter_count(arch)));
  for (double v : values)
    if (!std::isfinite(v)) throw NumericalError("non-finite network parameter");
}

NetworkParams init_params(const NetworkArch& arch, std::uint64_t seed) {
  NetworkParams p{arch, std::vector<double>(parameter_count(arch), 0.0)};
  Rng rng(seed);
  for (const auto& s : layer_layout(arch)) {
    const double limit = std::sqrt(6.0 / (s.rows + s.cols));
    const std::size_t n = static_cast<std::size_t>(s.rows) * s.cols;
    for (std::size_t i = 0; i < n; ++i) p.values[s.weight_offset + i] = rng.uniform(-limit, limit);
  }
  return p;
}

Eigen::MatrixXd forward(const NetworkParams& params, const Coords& inputs) {
  return jet(params, inputs, JetSpec::values_only()).value;
}

// ---------------------------------------------------------------------------

JetSpec JetSpec::from_partials(std::span<const Partial> request, int input_dim) {
  JetSpec spec;
  for (const auto& p : request) {
    if (p.axes.size() > 2)
      throw UnsupportedOrder("derivative order " + std::to_string(p.axes.size()) +
                             " requested; the jet engine supports order <= 2");
    for (int a : p.axes)
      if (a < 0 || a >= input_dim)
        throw DimensionError("partial along axis " + std::to_string(a) + " of a " +
                             std::to_string(input_dim) + "-input network");
    if (p.axes.size() >= 1) spec.first = true;
    if (p.axes.size() == 2) {
      std::array<int, 2> pair{std::min(p.axes[0], p.axes[1]), std::max(p.axes[0], p.axes[1])};
      if (std::find(spec.second.begin(), spec.second.end(), pair) == spec.second.end())
        spec.second.push_back(pair);
    }
  }
  return spec;
}

int JetSpec::channels(int input_dim) const {
  return 1 + (first ? input_dim : 0) + static_cast<int>(second.size());
}

int JetSpec::second_slot(int a, int b) const {
  const std::array<int, 2> pair{std::min(a, b), std::max(a, b)};
  const auto it = std::find(second.begin(), second.end(), pair);
  return it == second.end() ? -1 : static_cast<int>(it - second.begin());
}

bool JetBatch::has_second(int a, int b) const {
  const std::array<int, 2> pair{std::min(a, b), std::max(a, b)};
  return std::find(pairs.begin(), pairs.end(), pair) != pairs.end();
}

const Eigen::MatrixXd& JetBatch::d(int axis) const {
  if (axis < 0 || axis >= static_cast<int>(first.size()))
    throw MissingPartial("jet batch carries no first partial along axis " + std::to_string(axis));
  return first[axis];
}

const Eigen::MatrixXd& JetBatch::dd(int a, int b) const {
  const std::array<int, 2> pair{std::min(a, b), std::max(a, b)};
  const auto it = std::find(pairs.begin(), pairs.end(), pair);
  if (it == pairs.end())
    throw MissingPartial("jet batch carries no second partial (" + std::to_string(a) + "," +
                         std::to_string(b) + ")");
  return second[it - pairs.begin()];
}

JetBatch jet(const NetworkParams& params, const Coords& inputs, const JetSpec& spec) {
  JetTape tape;
  tape.record(params, inputs, spec);
  return tape.to_batch(inputs);
}

JetBatch jet(const NetworkParams& params, const Coords& inputs,
             std::span<const Partial> request) {
  return jet(params, inputs, JetSpec::from_partials(request, params.arch.input_dim));
}

// ---------------------------------------------------------------------------
// Jet propagation through a = tanh(z), per channel block:
//   a      = s(z)
//   a_k    = s'(z) z_k
//   a_kl   = s''(z) z_k z_l + s'(z) z_kl
// with s' = 1 - s^2, s'' = -2 s s', s''' = -2 (s'^2 + s s'').

Eigen::MatrixXd JetTape::activate(Layer& layer) const {
  const int B = batch_;
  const int D = params_->arch.input_dim;
  const auto& z = layer.pre;
  layer.s0 = z.leftCols(B).array().tanh();
  layer.s1 = 1.0 - layer.s0.square();
  layer.s2 = -2.0 * layer.s0 * layer.s1;

  Eigen::MatrixXd a(z.rows(), z.cols());
  a.leftCols(B) = layer.s0.matrix();
  if (!spec_.first) return a;
  for (int k = 0; k < D; ++k) {
    const int c = spec_.first_channel(k);
    a.middleCols(c * B, B).array() = layer.s1 * z.middleCols(c * B, B).array();
  }
  for (std::size_t slot = 0; slot < spec_.second.size(); ++slot) {
    const auto [p, q] = spec_.second[slot];
    const int c = spec_.second_channel(static_cast<int>(slot), D);
    const auto zp = z.middleCols(spec_.first_channel(p) * B, B).array();
    const auto zq = z.middleCols(spec_.first_channel(q) * B, B).array();
    a.middleCols(c * B, B).array() =
        layer.s2 * zp * zq + layer.s1 * z.middleCols(c * B, B).array();
  }
  return a;
}

Eigen::MatrixXd JetTape::activate_backward(const Layer& layer, const Eigen::MatrixXd& adj) const {
  const int B = batch_;
  const int D = params_->arch.input_dim;
  const auto& z = layer.pre;
  Eigen::MatrixXd zbar(adj.rows(), adj.cols());

  auto value_bar = zbar.leftCols(B).array();
  value_bar = adj.leftCols(B).array() * layer.s1;
  if (!spec_.first) return zbar;

  const Eigen::ArrayXXd s3 = -2.0 * (layer.s1.square() + layer.s0 * layer.s2);
  for (int k = 0; k < D; ++k) {
    const int c = spec_.first_channel(k);
    const auto ak = adj.middleCols(c * B, B).array();
    const auto zk = z.middleCols(c * B, B).array();
    zbar.middleCols(c * B, B).array() = ak * layer.s1;
    value_bar += ak * layer.s2 * zk;
  }
  for (std::size_t slot = 0; slot < spec_.second.size(); ++slot) {
    const auto [p, q] = spec_.second[slot];
    const int c = spec_.second_channel(static_cast<int>(slot), D);
    const int cp = spec_.first_channel(p), cq = spec_.first_channel(q);
    const auto akl = adj.middleCols(c * B, B).array();
    const auto zp = z.middleCols(cp * B, B).array();
    const auto zq = z.middleCols(cq * B, B).array();
    zbar.middleCols(c * B, B).array() = akl * layer.s1;
    zbar.middleCols(cp * B, B).array() += akl * layer.s2 * zq;
    zbar.middleCols(cq * B, B).array() += akl * layer.s2 * zp;
    value_bar += akl * (s3 * zp * zq + layer.s2 * z.middleCols(c * B, B).array());
  }
  return zbar;
}

void JetTape::record(const NetworkParams& params, const Coords& inputs, const JetSpec& spec) {
  const auto& arch = params.arch;
  if (params.values.size() != parameter_count(arch))
    throw DimensionError("parameter vector does not match its architecture");
  if (inputs.cols() != arch.input_dim)
    throw DimensionError("input batch has " + std::to_string(inputs.cols()) +
                         " columns, network expects " + std::to_string(arch.input_dim));
  for (const auto& [a, b] : spec.second)
    if (a < 0 || b >= arch.input_dim) throw DimensionError("second partial axis out of range");
  if (!spec.second.empty() && !spec.first)
    throw std::invalid_argument("second partials require first partials in the jet spec");

  params_ = &params;
  spec_ = spec;
  batch_ = static_cast<int>(inputs.rows());
  channels_ = spec.channels(arch.input_dim);
  const int B = batch_;
  const int D = arch.input_dim;

  // Seed: value block holds the coordinates, first-partial block k is e_k.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(D, static_cast<Eigen::Index>(channels_) * B);
  h.leftCols(B) = inputs.transpose();
  if (spec.first)
    for (int k = 0; k < D; ++k) h.row(k).segment(spec.first_channel(k) * B, B).setOnes();

  const auto layout = layer_layout(arch);
  layers_.clear();
  layers_.reserve(layout.size() - 1);
  auto dense = [&](const LayerSlice& s, Eigen::MatrixXd input) {
    Layer layer{s, std::move(input), {}, {}, {}, {}};
    layer.pre.noalias() = weights_of(params, s) * layer.input;
    layer.pre.leftCols(B).colwise() += bias_of(params, s);
    Eigen::MatrixXd out = activate(layer);
    layers_.push_back(std::move(layer));
    return out;
  };

  std::size_t next = 0;
  h = dense(layout[next++], std::move(h));
  for (int b = 0; b < arch.blocks; ++b) {
    Eigen::MatrixXd a = h;
    for (int l = 0; l < arch.layers_per_block; ++l) a = dense(layout[next++], std::move(a));
    h += a;
  }
  const auto& head = layout[next];
  head_input_ = std::move(h);
  output_.noalias() = weights_of(params, head) * head_input_;
  output_.leftCols(B).colwise() += bias_of(params, head);
}

JetBatch JetTape::to_batch(const Coords& inputs) const {
  const int B = batch_;
  const int D = params_->arch.input_dim;
  JetBatch out;
  out.points = inputs;
  out.value = output_.leftCols(B).transpose();
  if (spec_.first)
    for (int k = 0; k < D; ++k)
      out.first.push_back(output_.middleCols(spec_.first_channel(k) * B, B).transpose());
  out.pairs = spec_.second;
  for (std::size_t slot = 0; slot < spec_.second.size(); ++slot)
    out.second.push_back(
        output_.middleCols(spec_.second_channel(static_cast<int>(slot), D) * B, B).transpose());
  return out;
}

void JetTape::backward(const Eigen::MatrixXd& output_adjoint, std::span<double> grad) const {
  if (params_ == nullptr) throw std::logic_error("JetTape::backward before record");
  if (output_adjoint.rows() != output_.rows() || output_adjoint.cols() != output_.cols())
    throw DimensionError("output adjoint does not match the recorded jet");
  if (grad.size() != params_->values.size())
    throw DimensionError("gradient buffer does not match the parameter count");

  const auto& arch = params_->arch;
  const int B = batch_;
  const auto layout = layer_layout(arch);

  auto accumulate = [&](const LayerSlice& s, const Eigen::MatrixXd& zbar,
                        const Eigen::MatrixXd& input) {
    // Reduce into aligned temporaries: Eigen picks its summation order from
    // the destination address, and grad need not be aligned.
    const RowMajor w = zbar * input.transpose();
    const Eigen::VectorXd b = zbar.leftCols(B).rowwise().sum();
    Eigen::Map<RowMajor>(grad.data() + s.weight_offset, s.rows, s.cols) += w;
    Eigen::Map<Eigen::VectorXd>(grad.data() + s.bias_offset, s.rows) += b;
  };

  const auto& head = layout.back();
  accumulate(head, output_adjoint, head_input_);
  Eigen::MatrixXd hbar = weights_of(*params_, head).transpose() * output_adjoint;

  int li = static_cast<int>(layers_.size()) - 1;
  for (int b = arch.blocks - 1; b >= 0; --b) {
    Eigen::MatrixXd abar = hbar;
    for (int l = arch.layers_per_block - 1; l >= 0; --l, --li) {
      const Layer& layer = layers_[li];
      const Eigen::MatrixXd zbar = activate_backward(layer, abar);
      accumulate(layer.slice, zbar, layer.input);
      abar.noalias() = weights_of(*params_, layer.slice).transpose() * zbar;
    }
    hbar += abar;
  }
  const Layer& lift = layers_[li];
  accumulate(lift.slice, activate_backward(lift, hbar), lift.input);
}

}  // namespace pinnreg
