// src/neural_net.cc

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

#include "tclsv/neural_net.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "tclsv/binary_io.h"
#include "tclsv/error.h"
#include "tclsv/random.h"

namespace tclsv {

namespace {

Matrix Sigmoid(const Matrix &z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

Matrix Affine(const Matrix &x, const AffineLayer &layer) {
  Matrix z = x * layer.weights.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

// Row-wise log-softmax with the row max subtracted first.
Matrix LogSoftmax(const Matrix &logits) {
  Matrix out = logits;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    out.row(r).array() -= m;
    const double lse = std::log(out.row(r).array().exp().sum());
    out.row(r).array() -= lse;
  }
  return out;
}

std::vector<double> ResolveWeights(const std::vector<double> &weights, size_t heads) {
  if (!weights.empty()) return weights;
  return std::vector<double>(heads, 1.0 / static_cast<double>(heads));
}

}  // namespace

void NetworkArch::Validate() const {
  auto fail = [](const std::string &what) {
    throw Error(ErrorCode::kInvalidArgument, "network arch: " + what);
  };
  if (input_dim <= 0) fail("input_dim must be positive");
  if (hidden_layers.empty()) fail("need at least one hidden layer");
  for (int w : hidden_layers)
    if (w <= 0) fail("hidden layer widths must be positive");
  if (heads.empty()) fail("need at least one output head");
  for (const auto &h : heads)
    if (h.num_classes < 2) fail("head '" + h.name + "' needs >= 2 classes");
}

size_t LayerSet::NumParams() const {
  size_t n = 0;
  for (const auto *set : {&hidden, &heads})
    for (const auto &l : *set) n += static_cast<size_t>(l.weights.size() + l.bias.size());
  return n;
}

Vector LayerSet::Flatten() const {
  Vector flat(static_cast<Eigen::Index>(NumParams()));
  Eigen::Index pos = 0;
  for (const auto *set : {&hidden, &heads}) {
    for (const auto &l : *set) {
      flat.segment(pos, l.weights.size()) =
          Eigen::Map<const Vector>(l.weights.data(), l.weights.size());
      pos += l.weights.size();
      flat.segment(pos, l.bias.size()) = l.bias;
      pos += l.bias.size();
    }
  }
  return flat;
}

void LayerSet::Unflatten(const Vector &flat) {
  if (flat.size() != static_cast<Eigen::Index>(NumParams()))
    throw Error(ErrorCode::kDimensionMismatch, "parameter vector length");
  Eigen::Index pos = 0;
  for (auto *set : {&hidden, &heads}) {
    for (auto &l : *set) {
      Eigen::Map<Vector>(l.weights.data(), l.weights.size()) =
          flat.segment(pos, l.weights.size());
      pos += l.weights.size();
      l.bias = flat.segment(pos, l.bias.size());
      pos += l.bias.size();
    }
  }
}

void LabeledDataset::Validate(const NetworkArch &arch) const {
  if (inputs.cols() != arch.input_dim)
    throw Error(ErrorCode::kDimensionMismatch,
                "dataset width " + std::to_string(inputs.cols()) + " != input_dim " +
                    std::to_string(arch.input_dim));
  if (labels.size() != arch.heads.size())
    throw Error(ErrorCode::kDimensionMismatch, "dataset has " + std::to_string(labels.size()) +
                                                   " label heads, network has " +
                                                   std::to_string(arch.heads.size()));
  for (size_t h = 0; h < labels.size(); ++h) {
    if (static_cast<Eigen::Index>(labels[h].size()) != inputs.rows())
      throw Error(ErrorCode::kDimensionMismatch, "head " + arch.heads[h].name + " label count");
    for (int y : labels[h])
      if (y < 0 || y >= arch.heads[h].num_classes)
        throw Error(ErrorCode::kInvalidArgument,
                    "label " + std::to_string(y) + " out of range for head " + arch.heads[h].name);
  }
}

void TrainConfig::Validate(size_t num_heads) const {
  auto fail = [](const std::string &what) {
    throw Error(ErrorCode::kInvalidArgument, "train config: " + what);
  };
  if (!(learning_rate >= 0.0)) fail("learning_rate must be non-negative");
  if (epochs < 0) fail("epochs must be non-negative");
  if (minibatch_size < 1) fail("minibatch_size must be positive");
  if (!task_weights.empty()) {
    if (task_weights.size() != num_heads) fail("one task weight per head required");
    const double sum = std::accumulate(task_weights.begin(), task_weights.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) fail("task weights must sum to 1");
    for (double w : task_weights)
      if (w < 0.0) fail("task weights must be non-negative");
  }
}

Matrix StackContext(const Matrix &features, int left, int right) {
  const Eigen::Index num_frames = features.rows();
  const Eigen::Index dim = features.cols();
  const int width = left + 1 + right;
  Matrix out(num_frames, dim * width);
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    for (int j = 0; j < width; ++j) {
      const Eigen::Index src = std::clamp<Eigen::Index>(t - left + j, 0, num_frames - 1);
      out.block(t, j * dim, 1, dim) = features.row(src);
    }
  }
  return out;
}

NetworkParams InitNetwork(const NetworkArch &arch, uint64_t seed) {
  arch.Validate();
  Rng rng(seed);
  auto make = [&rng](int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    AffineLayer l{Matrix(fan_out, fan_in), Vector::Zero(fan_out)};
    for (Eigen::Index i = 0; i < l.weights.size(); ++i)
      l.weights.data()[i] = rng.Uniform(-limit, limit);
    return l;
  };
  NetworkParams params;
  params.arch = arch;
  params.rng_seed = seed;
  int prev = arch.input_dim;
  for (int width : arch.hidden_layers) {
    params.layers.hidden.push_back(make(prev, width));
    prev = width;
  }
  for (const auto &head : arch.heads) params.layers.heads.push_back(make(prev, head.num_classes));
  return params;
}

ForwardResult Forward(const NetworkParams &params, const Matrix &inputs) {
  if (inputs.cols() != params.arch.input_dim)
    throw Error(ErrorCode::kDimensionMismatch,
                "input width " + std::to_string(inputs.cols()) + " != " +
                    std::to_string(params.arch.input_dim));
  ForwardResult out;
  const Matrix *x = &inputs;
  for (const auto &layer : params.layers.hidden) {
    out.hidden.push_back(Sigmoid(Affine(*x, layer)));
    x = &out.hidden.back();
  }
  for (const auto &head : params.layers.heads) {
    out.log_posteriors.push_back(LogSoftmax(Affine(*x, head)));
    out.posteriors.push_back(out.log_posteriors.back().array().exp().matrix());
  }
  return out;
}

double Loss(const std::vector<Matrix> &log_posteriors,
            const std::vector<std::vector<int>> &labels,
            const std::vector<double> &task_weights) {
  if (labels.size() != log_posteriors.size())
    throw Error(ErrorCode::kDimensionMismatch, "loss: heads and label sets differ");
  const auto weights = ResolveWeights(task_weights, log_posteriors.size());
  double total = 0.0;
  for (size_t h = 0; h < log_posteriors.size(); ++h) {
    const Matrix &lp = log_posteriors[h];
    if (static_cast<Eigen::Index>(labels[h].size()) != lp.rows())
      throw Error(ErrorCode::kDimensionMismatch, "loss: label count");
    double nll = 0.0;
    for (Eigen::Index r = 0; r < lp.rows(); ++r) nll -= lp(r, labels[h][static_cast<size_t>(r)]);
    total += weights[h] * nll / static_cast<double>(lp.rows());
  }
  return total;
}

BackwardResult Backward(const NetworkParams &params, const Matrix &inputs,
                        const std::vector<std::vector<int>> &labels,
                        const std::vector<double> &task_weights) {
  const ForwardResult fwd = Forward(params, inputs);
  const auto weights = ResolveWeights(task_weights, params.layers.heads.size());
  const double batch = static_cast<double>(inputs.rows());
  const Matrix &top = fwd.hidden.back();

  BackwardResult out;
  out.loss = Loss(fwd.log_posteriors, labels, weights);

  Matrix delta = Matrix::Zero(top.rows(), top.cols());
  for (size_t h = 0; h < params.layers.heads.size(); ++h) {
    Matrix dz = fwd.posteriors[h];
    for (Eigen::Index r = 0; r < dz.rows(); ++r) dz(r, labels[h][static_cast<size_t>(r)]) -= 1.0;
    dz *= weights[h] / batch;
    const AffineLayer &head = params.layers.heads[h];
    out.gradients.heads.push_back({dz.transpose() * top, dz.colwise().sum().transpose()});
    delta += dz * head.weights;
  }

  const int num_hidden = static_cast<int>(params.layers.hidden.size());
  out.gradients.hidden.resize(static_cast<size_t>(num_hidden));
  for (int l = num_hidden - 1; l >= 0; --l) {
    const Matrix &a = fwd.hidden[static_cast<size_t>(l)];
    const Matrix dz = (delta.array() * a.array() * (1.0 - a.array())).matrix();
    const Matrix &below = l == 0 ? inputs : fwd.hidden[static_cast<size_t>(l - 1)];
    out.gradients.hidden[static_cast<size_t>(l)] = {dz.transpose() * below,
                                                     dz.colwise().sum().transpose()};
    if (l > 0) delta = dz * params.layers.hidden[static_cast<size_t>(l)].weights;
  }
  return out;
}

TrainResult Train(const LabeledDataset &dataset, const NetworkArch &arch,
                  uint64_t init_seed, const TrainConfig &config) {
  arch.Validate();
  config.Validate(arch.heads.size());
  dataset.Validate(arch);
  if (dataset.NumExamples() == 0)
    throw Error(ErrorCode::kInvalidArgument, "train: empty dataset");

  TrainResult result;
  result.params = InitNetwork(arch, init_seed);
  NetworkParams &params = result.params;
  const auto weights = ResolveWeights(config.task_weights, arch.heads.size());

  const size_t m = static_cast<size_t>(dataset.NumExamples());
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(config.shuffle_seed);

  const size_t batch_size = static_cast<size_t>(config.minibatch_size);
  Matrix batch_inputs;
  std::vector<std::vector<int>> batch_labels(arch.heads.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(order));
    double epoch_loss = 0.0;
    for (size_t start = 0; start < m; start += batch_size) {
      const size_t n = std::min(batch_size, m - start);
      batch_inputs.resize(static_cast<Eigen::Index>(n), dataset.inputs.cols());
      for (auto &bl : batch_labels) bl.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const size_t src = order[start + i];
        batch_inputs.row(static_cast<Eigen::Index>(i)) =
            dataset.inputs.row(static_cast<Eigen::Index>(src));
        for (size_t h = 0; h < batch_labels.size(); ++h)
          batch_labels[h][i] = dataset.labels[h][src];
      }
      const BackwardResult step = Backward(params, batch_inputs, batch_labels, weights);
      epoch_loss += step.loss * static_cast<double>(n);
      if (config.learning_rate == 0.0) continue;
      auto apply = [&](std::vector<AffineLayer> &layers, const std::vector<AffineLayer> &grads) {
        for (size_t l = 0; l < layers.size(); ++l) {
          layers[l].weights -= config.learning_rate * grads[l].weights;
          layers[l].bias -= config.learning_rate * grads[l].bias;
        }
      };
      apply(params.layers.hidden, step.gradients.hidden);
      apply(params.layers.heads, step.gradients.heads);
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(m));
  }
  return result;
}

int ParseLayerName(const std::string &name, int num_hidden) {
  if (name.size() >= 2 && (name[0] == 'L' || name[0] == 'l')) {
    int index = 0;
    bool digits = true;
    for (size_t i = 1; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') {
        digits = false;
        break;
      }
      index = index * 10 + (name[i] - '0');
      if (index > 100000) break;
    }
    if (digits && index >= 1 && index <= num_hidden) return index;
  }
  throw Error(ErrorCode::kUnknownLayer,
              "'" + name + "' (network has L1..L" + std::to_string(num_hidden) + ")");
}

Matrix ExtractDeepFeatures(const NetworkParams &params, const Matrix &inputs, int layer) {
  if (layer < 1 || layer > params.arch.NumHidden())
    throw Error(ErrorCode::kUnknownLayer, "L" + std::to_string(layer));
  if (inputs.cols() != params.arch.input_dim)
    throw Error(ErrorCode::kDimensionMismatch, "deep feature input width");
  Matrix a = inputs;
  for (int l = 0; l < layer; ++l) a = Sigmoid(Affine(a, params.layers.hidden[static_cast<size_t>(l)]));
  return a;
}

Matrix ExtractDeepFeatures(const NetworkParams &params, const Matrix &inputs,
                           const std::string &layer_name) {
  return ExtractDeepFeatures(params, inputs, ParseLayerName(layer_name, params.arch.NumHidden()));
}

std::vector<char> EncodeNetwork(const NetworkParams &params) {
  BinaryWriter w;
  w.WriteMagic("TCLN");
  w.WriteU32(kNetworkFileVersion);
  w.WriteU64(params.rng_seed);
  w.WriteU32(static_cast<uint32_t>(params.arch.input_dim));
  w.WriteU32(static_cast<uint32_t>(params.arch.hidden_layers.size()));
  for (int width : params.arch.hidden_layers) w.WriteU32(static_cast<uint32_t>(width));
  w.WriteU32(static_cast<uint32_t>(params.arch.heads.size()));
  for (const auto &h : params.arch.heads) w.WriteU32(static_cast<uint32_t>(h.num_classes));
  const Vector flat = params.layers.Flatten();
  w.WriteF64s(std::span<const double>(flat.data(), static_cast<size_t>(flat.size())));
  return w.bytes();
}

NetworkParams DecodeNetwork(std::vector<char> bytes, const std::string &what) {
  BinaryReader r(std::move(bytes), what);
  r.ExpectMagic("TCLN");
  const uint32_t version = r.ReadU32();
  if (version != kNetworkFileVersion)
    throw Error(ErrorCode::kFormat, what + ": unsupported network version " + std::to_string(version));
  NetworkArch arch;
  const uint64_t seed = r.ReadU64();
  arch.input_dim = static_cast<int>(r.ReadU32());
  arch.hidden_layers.resize(r.ReadU32());
  for (int &width : arch.hidden_layers) width = static_cast<int>(r.ReadU32());
  arch.heads.resize(r.ReadU32());
  for (size_t h = 0; h < arch.heads.size(); ++h) {
    arch.heads[h].name = "head" + std::to_string(h);
    arch.heads[h].num_classes = static_cast<int>(r.ReadU32());
  }
  try {
    arch.Validate();
  } catch (const Error &e) {
    throw Error(ErrorCode::kFormat, what + ": " + e.what());
  }
  NetworkParams params = InitNetwork(arch, 0);
  params.rng_seed = seed;
  Vector flat(static_cast<Eigen::Index>(params.layers.NumParams()));
  r.ReadF64s(std::span<double>(flat.data(), static_cast<size_t>(flat.size())));
  r.ExpectEnd();
  params.layers.Unflatten(flat);
  return params;
}

void WriteNetwork(const std::filesystem::path &path, const NetworkParams &params) {
  WriteFileAtomic(path, EncodeNetwork(params));
}

NetworkParams ReadNetwork(const std::filesystem::path &path) {
  return DecodeNetwork(ReadFileBytes(path), path.string());
}

}  // namespace tclsv
