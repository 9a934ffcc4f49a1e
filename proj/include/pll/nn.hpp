#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pll/matrix.hpp"

namespace pll {

/// Architecture of the fixed dense/batch-norm/ELU family. Each hidden layer
/// is dense -> batch norm -> ELU; the output layer is dense and emits raw
/// logits (no normalization before the softmax).
struct ModelSpec {
  int input_dim = 0;
  std::vector<int> hidden_dims{512, 256};
  int output_dim = 0;
  double elu_alpha = 1.0;
  double bn_epsilon = 1e-5;
  double bn_momentum = 0.1;

  void validate() const;

  /// [input_dim, hidden..., output_dim]
  std::vector<int> layer_dims() const;

  int num_dense() const { return static_cast<int>(hidden_dims.size()) + 1; }
  int num_bn() const { return static_cast<int>(hidden_dims.size()); }
};

struct DenseLayer {
  Matrix weight;  // fan_in x fan_out
  Vector bias;    // fan_out
};

struct BatchNormLayer {
  Vector gamma;
  Vector beta;
  Vector running_mean;
  Vector running_var;
};

enum class Mode { Training, Inference };

struct ModelParams {
  ModelSpec spec;
  std::vector<DenseLayer> dense;   // hidden layers then output layer
  std::vector<BatchNormLayer> bn;  // one per hidden layer
  Mode mode = Mode::Training;
};

struct DenseGrad {
  Matrix weight;
  Vector bias;
};

struct BatchNormGrad {
  Vector gamma;
  Vector beta;
};

/// Gradients of a scalar loss w.r.t. every trainable tensor.
struct ModelGrads {
  std::vector<DenseGrad> dense;
  std::vector<BatchNormGrad> bn;
};

/// A mini-batch: features plus per-example candidate-label bitmasks and
/// (optionally) true labels. Invariants: every mask row has at least one set
/// bit; if labels are present, each example's label bit is set in its mask.
struct Batch {
  Matrix features;       // B x d
  MaskMatrix masks;      // B x K
  std::optional<LabelVector> labels;

  void validate() const;
};

struct LayerCache {
  Matrix input;          // into the dense layer
  RowVector batch_mean;  // per-feature
  RowVector inv_std;     // 1/sqrt(var + eps)
  Matrix normalized;     // x_hat
  Matrix pre_act;        // gamma * x_hat + beta
  Matrix activated;      // ELU output
};

struct ForwardCache {
  std::vector<LayerCache> hidden;
  Matrix output_input;  // into the final dense layer
  Mode mode = Mode::Training;
  Eigen::Index batch_size = 0;
};

struct ForwardResult {
  Matrix logits;  // B x K
  Matrix probs;   // row-wise softmax of logits
  ForwardCache cache;
};

/// Weights drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)] per dense
/// layer, biases zero; batch-norm scale 1, shift 0, running mean 0, running
/// variance 1. Deterministic for a fixed seed.
ModelParams init_model(const ModelSpec& spec, std::uint64_t seed);

/// Forward pass over a feature matrix. In training mode batch statistics are
/// used by batch norm and the running statistics in `params` are updated
/// (training mode requires at least two rows). In inference mode running
/// statistics are used and `params` is not modified. Non-finite activations
/// raise NumericError naming the layer.
ForwardResult forward(ModelParams& params, const Eigen::Ref<const Matrix>& features);

/// Exact gradients of the scalar loss w.r.t. every trainable tensor, given
/// d(loss)/d(logits). Requires a training-mode cache; the batch-statistics
/// path of batch norm is differentiated in full.
ModelGrads backward(const ModelParams& params, const ForwardCache& cache,
                    const Eigen::Ref<const Matrix>& dloss_dlogits);

/// Row-wise argmax of inference-mode logits; ties resolve to the lowest
/// index. Pure function of (params, features); requires inference mode.
LabelVector predict(const ModelParams& params, const Eigen::Ref<const Matrix>& features);

/// Trainable parameter count: dense weights+biases plus batch-norm
/// scale+shift (running statistics excluded).
std::int64_t parameter_count(const ModelSpec& spec);

/// Trainable tensors in serialization order: per dense layer the weight
/// matrix (row-major) then the bias; then per batch-norm layer gamma then
/// beta. Used by the quantized-complexity proxy and the flat snapshot.
std::vector<Vector> trainable_tensors(const ModelParams& params);

/// Flat binary snapshot: "PLLPARAM" magic, version, layer dims, then every
/// tensor (including running statistics) as little-endian 64-bit floats.
void save_params(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace pll
