// tclsv/neural_net.h

// Copyright 2026 The tclsv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TCLSV_NEURAL_NET_H_
#define TCLSV_NEURAL_NET_H_

// Feed-forward sigmoid DNN with one or more softmax output heads sharing
// the last hidden layer. Heads are trained jointly on a weighted sum of
// their cross-entropies (0.5/0.5 for the speaker + pass-phrase setup).

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tclsv/audio_frontend.h"
#include "tclsv/types.h"

namespace tclsv {

struct OutputHead {
  std::string name;
  int num_classes = 0;
};

struct NetworkArch {
  int input_dim = 627;
  std::vector<int> hidden_layers = std::vector<int>(6, 1024);  // L1..L6
  std::vector<OutputHead> heads;

  void Validate() const;
  int NumHidden() const { return static_cast<int>(hidden_layers.size()); }
};

/// y = W x + b with W stored output-major (rows = output units).
struct AffineLayer {
  Matrix weights;
  Vector bias;
};

/// Parameters (or gradients, which share the shape) of every layer.
struct LayerSet {
  std::vector<AffineLayer> hidden;
  std::vector<AffineLayer> heads;

  size_t NumParams() const;
  /// Concatenation of every layer's weights (row-major) then bias, hidden
  /// layers first; this is also the on-disk parameter order.
  Vector Flatten() const;
  /// Inverse of Flatten; shapes must already be set.
  void Unflatten(const Vector &flat);
};

struct NetworkParams {
  NetworkArch arch;
  LayerSet layers;
  uint64_t rng_seed = 0;
};

struct LabeledDataset {
  Matrix inputs;                         // M x input_dim
  std::vector<std::vector<int>> labels;  // per head, length M each

  Eigen::Index NumExamples() const { return inputs.rows(); }
  void Validate(const NetworkArch &arch) const;
};

struct TrainConfig {
  double learning_rate = 0.008;
  int epochs = 20;
  int minibatch_size = 256;
  uint64_t shuffle_seed = 0;
  std::vector<double> task_weights;  // empty: uniform over heads

  void Validate(size_t num_heads) const;
};

struct ForwardResult {
  std::vector<Matrix> hidden;          // post-sigmoid, one per hidden layer
  std::vector<Matrix> log_posteriors;  // per head
  std::vector<Matrix> posteriors;      // per head, rows sum to 1
};

struct TrainResult {
  NetworkParams params;
  std::vector<double> loss_trace;  // mean minibatch loss per epoch
};

/// Row t is frames t-left..t+right concatenated; out-of-range indices are
/// clamped to the first/last frame.
Matrix StackContext(const Matrix &features, int left, int right);

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
NetworkParams InitNetwork(const NetworkArch &arch, uint64_t seed);

/// Throws DimensionMismatch if the batch width differs from arch.input_dim.
ForwardResult Forward(const NetworkParams &params, const Matrix &inputs);

/// Weighted sum over heads of the mean negative log posterior of the true
/// class. `labels[h]` aligns with the rows of `log_posteriors[h]`.
double Loss(const std::vector<Matrix> &log_posteriors,
            const std::vector<std::vector<int>> &labels,
            const std::vector<double> &task_weights);

struct BackwardResult {
  LayerSet gradients;
  double loss = 0.0;
};

/// Gradient of Loss w.r.t. every parameter for one batch.
BackwardResult Backward(const NetworkParams &params, const Matrix &inputs,
                        const std::vector<std::vector<int>> &labels,
                        const std::vector<double> &task_weights);

/// Plain minibatch SGD. Minibatch order is reshuffled every epoch from
/// config.shuffle_seed, so the result is a pure function of the inputs.
TrainResult Train(const LabeledDataset &dataset, const NetworkArch &arch,
                  uint64_t init_seed, const TrainConfig &config);

/// "L1".."Ln" -> 1..n; throws UnknownLayer.
int ParseLayerName(const std::string &name, int num_hidden);

/// Post-sigmoid activations of hidden layer `layer` (1-based).
Matrix ExtractDeepFeatures(const NetworkParams &params, const Matrix &inputs, int layer);
Matrix ExtractDeepFeatures(const NetworkParams &params, const Matrix &inputs,
                           const std::string &layer_name);

// Model file:
//   "TCLN" | u32 version | u64 init seed | u32 input_dim | u32 num_hidden |
//   u32 width x num_hidden | u32 num_heads | u32 classes x num_heads |
//   parameters in LayerSet::Flatten order, f64 little-endian
inline constexpr uint32_t kNetworkFileVersion = 1;

std::vector<char> EncodeNetwork(const NetworkParams &params);
NetworkParams DecodeNetwork(std::vector<char> bytes, const std::string &what);
void WriteNetwork(const std::filesystem::path &path, const NetworkParams &params);
NetworkParams ReadNetwork(const std::filesystem::path &path);

}  // namespace tclsv

#endif  // TCLSV_NEURAL_NET_H_
