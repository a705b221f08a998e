#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pinnreg {

/// Point batches: one row per point, columns are the inputs (x[, y], t).
using Coords = Eigen::MatrixXd;

enum class Activation { tanh };

/// Fully connected ResNet: a lifting layer input_dim -> width, `blocks`
/// residual blocks h <- h + F(h) where F stacks `layers_per_block` tanh
/// layers, and a linear head width -> output_dim.
struct NetworkArch {
  int input_dim = 2;
  int output_dim = 1;
  int blocks = 2;
  int layers_per_block = 2;
  int width = 64;
  Activation activation = Activation::tanh;

  void validate() const;
  bool operator==(const NetworkArch&) const = default;
};

/// One dense layer inside the flat parameter vector. Weights are stored
/// row-major (rows = outputs), followed by the bias.
struct LayerSlice {
  std::size_t weight_offset;
  std::size_t bias_offset;
  int rows;
  int cols;
  bool activated;
};

/// Canonical layer order: lift, block layers in order, head.
std::vector<LayerSlice> layer_layout(const NetworkArch& arch);

/// in*w + w + blocks*layers*(w*w + w) + w*out + out.
std::size_t parameter_count(const NetworkArch& arch);

struct NetworkParams {
  NetworkArch arch;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  /// Throws if the length disagrees with the architecture or an entry is
  /// non-finite.
  void validate() const;
};

/// Glorot-uniform weights, zero biases. Deterministic for a fixed seed.
NetworkParams init_params(const NetworkArch& arch, std::uint64_t seed);

/// Plain evaluation, one output row per input row.
Eigen::MatrixXd forward(const NetworkParams& params, const Coords& inputs);

/// A requested partial derivative: empty axes is the value itself,
/// one axis a first partial, two axes a second partial.
struct Partial {
  std::vector<int> axes;
};

/// Which input derivatives a jet evaluation carries. Second partials are
/// stored as sorted axis pairs; requesting any second partial turns on all
/// first partials since the second-order recursion needs them.
struct JetSpec {
  bool first = false;
  std::vector<std::array<int, 2>> second;

  static JetSpec from_partials(std::span<const Partial> request, int input_dim);
  static JetSpec values_only() { return {}; }

  int channels(int input_dim) const;
  int first_channel(int axis) const { return 1 + axis; }
  /// -1 when the pair is not carried.
  int second_slot(int a, int b) const;
  int second_channel(int slot, int input_dim) const { return 1 + input_dim + slot; }
};

/// The network output and its input partials at every point of a batch.
struct JetBatch {
  Coords points;
  Eigen::MatrixXd value;                  // N x outputs
  std::vector<Eigen::MatrixXd> first;     // per input axis; empty when not requested
  std::vector<std::array<int, 2>> pairs;  // sorted (a <= b)
  std::vector<Eigen::MatrixXd> second;    // per pair

  std::size_t size() const { return static_cast<std::size_t>(value.rows()); }
  bool has_first() const { return !first.empty(); }
  bool has_second(int a, int b) const;
  /// Throw MissingPartial when absent.
  const Eigen::MatrixXd& d(int axis) const;
  const Eigen::MatrixXd& dd(int a, int b) const;
};

/// Exact input partials of the implemented forward map.
JetBatch jet(const NetworkParams& params, const Coords& inputs,
             std::span<const Partial> request);
JetBatch jet(const NetworkParams& params, const Coords& inputs, const JetSpec& spec);

/// Forward jet pass that keeps its intermediates so the weight gradient of
/// any scalar function of the jet can be pulled back afterwards.
///
/// Internally every quantity is a (features x channels*batch) matrix whose
/// column blocks are the channels: value, first partials, second partials.
class JetTape {
 public:
  void record(const NetworkParams& params, const Coords& inputs, const JetSpec& spec);

  /// outputs x (channels * batch).
  const Eigen::MatrixXd& output() const { return output_; }
  int batch() const { return batch_; }
  int channels() const { return channels_; }
  const JetSpec& spec() const { return spec_; }

  /// Convert the recorded output to the public batch layout.
  JetBatch to_batch(const Coords& inputs) const;

  /// grad += d(scalar)/d(params), given d(scalar)/d(output) in the same
  /// layout as output().
  void backward(const Eigen::MatrixXd& output_adjoint, std::span<double> grad) const;

 private:
  struct Layer {
    LayerSlice slice;
    Eigen::MatrixXd input;  // features_in x channels*batch
    Eigen::MatrixXd pre;    // features_out x channels*batch
    Eigen::ArrayXXd s0, s1, s2;  // tanh and its first two derivatives, features_out x batch
  };

  Eigen::MatrixXd activate(Layer& layer) const;
  Eigen::MatrixXd activate_backward(const Layer& layer, const Eigen::MatrixXd& adj) const;

  const NetworkParams* params_ = nullptr;
  JetSpec spec_;
  int batch_ = 0;
  int channels_ = 1;
  std::vector<Layer> layers_;
  Eigen::MatrixXd head_input_;
  Eigen::MatrixXd output_;
};

}  // namespace pinnreg
