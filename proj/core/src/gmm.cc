// src/gmm.cc

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

#include "tclsv/gmm.h"

#include <cmath>
#include <limits>
#include <span>

#include "tclsv/binary_io.h"
#include "tclsv/error.h"
#include "tclsv/random.h"

namespace tclsv {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kMinOccupancy = 1e-10;

void CheckDims(const GmmModel &model, Eigen::Index cols, const char *what) {
  if (cols != model.Dim())
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": data dim " + std::to_string(cols) +
                    " != model dim " + std::to_string(model.Dim()));
}

// Row-wise log-sum-exp of a T x K matrix.
Vector RowLogSumExp(const Matrix &m) {
  Vector out(m.rows());
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    const double mx = m.row(t).maxCoeff();
    out[t] = mx + std::log((m.row(t).array() - mx).exp().sum());
  }
  return out;
}

}  // namespace

void GmmModel::Validate() const {
  auto fail = [](const std::string &what) {
    throw Error(ErrorCode::kInvalidArgument, "gmm: " + what);
  };
  const Eigen::Index k = weights.size();
  if (k == 0) fail("no components");
  if (means.rows() != k || variances.rows() != k || variances.cols() != means.cols())
    fail("inconsistent shapes");
  if ((weights.array() < 0.0).any()) fail("negative weight");
  if (std::abs(weights.sum() - 1.0) > 1e-9) fail("weights do not sum to 1");
  if (!(variances.array() > 0.0).all()) fail("non-positive variance");
  if (!means.allFinite() || !variances.allFinite() || !weights.allFinite())
    fail("non-finite parameter");
}

void MapConfig::Validate() const {
  if (!(relevance_factor > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "map: relevance_factor must be positive");
  if (iterations < 1)
    throw Error(ErrorCode::kInvalidArgument, "map: iterations must be >= 1");
}

Vector VarianceFloor(const Matrix &data, double fraction) {
  const RowVector mean = data.colwise().mean();
  const RowVector var =
      (data.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(data.rows());
  Vector floor = fraction * var.transpose();
  // Constant dimensions would otherwise get a zero floor.
  for (Eigen::Index d = 0; d < floor.size(); ++d)
    if (!(floor[d] > 0.0)) floor[d] = std::numeric_limits<double>::min() * 1e6;
  return floor;
}

GmmModel InitGmm(const Matrix &data, int num_components, uint64_t seed, int lloyd_iterations) {
  const Eigen::Index n = data.rows();
  const Eigen::Index dim = data.cols();
  if (num_components < 1)
    throw Error(ErrorCode::kInvalidArgument, "gmm: need at least one component");
  if (n < num_components)
    throw Error(ErrorCode::kTooFewFrames, std::to_string(n) + " frames for " +
                                              std::to_string(num_components) + " components");
  Rng rng(seed);
  Matrix centers(num_components, dim);
  centers.row(0) = data.row(static_cast<Eigen::Index>(rng.UniformInt(static_cast<uint64_t>(n))));
  Vector nearest = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < num_components; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = rng.Uniform() * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= nearest[i];
        if (target < 0.0 && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.UniformInt(static_cast<uint64_t>(n)));
    }
    centers.row(c) = data.row(pick);
    nearest = nearest.cwiseMin((data.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<Eigen::Index> assign(static_cast<size_t>(n), -1);
  for (int iter = 0; iter < lloyd_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best;
      (centers.rowwise() - data.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (assign[static_cast<size_t>(i)] != best) {
        assign[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(num_components, dim);
    Vector counts = Vector::Zero(num_components);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<size_t>(i)]) += data.row(i);
      counts[assign[static_cast<size_t>(i)]] += 1.0;
    }
    for (int c = 0; c < num_components; ++c)
      if (counts[c] > 0.0) centers.row(c) = sums.row(c) / counts[c];
  }

  const RowVector mean = data.colwise().mean();
  RowVector var =
      (data.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n);
  const Vector floor = VarianceFloor(data);
  var = var.cwiseMax(floor.transpose());

  GmmModel model;
  model.weights = Vector::Constant(num_components, 1.0 / num_components);
  model.means = centers;
  model.variances = var.replicate(num_components, 1);
  return model;
}

Matrix ComponentLogLikelihoods(const GmmModel &model, const Matrix &data) {
  CheckDims(model, data.cols(), "gmm");
  const Eigen::Index k = model.NumComponents();
  const double dim = static_cast<double>(model.Dim());
  Matrix out(data.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::ArrayXd inv_var = model.variances.row(c).array().inverse().transpose();
    const double log_norm = std::log(model.weights[c]) -
                            0.5 * (dim * kLog2Pi + model.variances.row(c).array().log().sum());
    const Vector mahal =
        (data.rowwise() - model.means.row(c)).array().square().matrix() * inv_var.matrix();
    out.col(c) = (log_norm - 0.5 * mahal.array()).matrix();
  }
  return out;
}

Matrix Responsibilities(const GmmModel &model, const Matrix &data, double *total) {
  Matrix ll = ComponentLogLikelihoods(model, data);
  const Vector lse = RowLogSumExp(ll);
  if (total) *total = lse.sum();
  ll.colwise() -= lse;
  return ll.array().exp().matrix();
}

EmStepResult EmStep(const GmmModel &model, const Matrix &data, const Vector &variance_floor) {
  if (data.rows() == 0) throw Error(ErrorCode::kTooFewFrames, "em: no data");
  CheckDims(model, data.cols(), "em");
  EmStepResult out;
  const Matrix gamma = Responsibilities(model, data, &out.log_likelihood);
  const Vector occupancy = gamma.colwise().sum().transpose();
  const Eigen::Index k = model.NumComponents();

  GmmModel next = model;
  for (Eigen::Index c = 0; c < k; ++c) {
    const double n_c = occupancy[c];
    if (n_c < kMinOccupancy) continue;
    const RowVector mean = (gamma.col(c).transpose() * data) / n_c;
    const Matrix centered = data.rowwise() - mean;
    RowVector var = (gamma.col(c).transpose() * centered.array().square().matrix()) / n_c;
    next.means.row(c) = mean;
    next.variances.row(c) = var.cwiseMax(variance_floor.transpose());
    next.weights[c] = n_c / static_cast<double>(data.rows());
  }
  next.weights /= next.weights.sum();
  out.model = std::move(next);
  return out;
}

UbmTrainResult TrainUbm(const Matrix &data, int num_components, int em_iterations,
                        uint64_t seed) {
  if (em_iterations < 0)
    throw Error(ErrorCode::kInvalidArgument, "ubm: em_iterations must be >= 0");
  UbmTrainResult out;
  out.model = InitGmm(data, num_components, seed);
  out.variance_floor = VarianceFloor(data);
  for (int i = 0; i < em_iterations; ++i) {
    EmStepResult step = EmStep(out.model, data, out.variance_floor);
    out.log_likelihood_trace.push_back(step.log_likelihood);
    out.model = std::move(step.model);
  }
  return out;
}

GmmModel MapAdapt(const GmmModel &ubm, const Matrix &enrollment, const MapConfig &config) {
  config.Validate();
  if (enrollment.rows() == 0) throw Error(ErrorCode::kEmptyEnrollment, "no enrollment frames");
  CheckDims(ubm, enrollment.cols(), "map");
  GmmModel model = ubm;
  for (int iter = 0; iter < config.iterations; ++iter) {
    const Matrix gamma = Responsibilities(model, enrollment);
    for (Eigen::Index c = 0; c < model.NumComponents(); ++c) {
      const double n_c = gamma.col(c).sum();
      if (n_c <= 0.0) continue;
      const RowVector expected = (gamma.col(c).transpose() * enrollment) / n_c;
      const double alpha = n_c / (n_c + config.relevance_factor);
      model.means.row(c) = alpha * expected + (1.0 - alpha) * model.means.row(c);
    }
  }
  return model;
}

double LogLikelihood(const GmmModel &model, const RowVector &frame) {
  CheckDims(model, frame.size(), "log_likelihood");
  Matrix one(1, frame.size());
  one.row(0) = frame;
  return RowLogSumExp(ComponentLogLikelihoods(model, one))[0];
}

Vector FrameLogLikelihoods(const GmmModel &model, const Matrix &data) {
  return RowLogSumExp(ComponentLogLikelihoods(model, data));
}

double ScoreLlr(const GmmModel &target, const GmmModel &ubm, const Matrix &utterance) {
  if (utterance.rows() == 0) throw Error(ErrorCode::kEmptyUtterance, "llr: no frames");
  const Vector diff = FrameLogLikelihoods(target, utterance) - FrameLogLikelihoods(ubm, utterance);
  return diff.sum() / static_cast<double>(utterance.rows());
}

std::vector<char> EncodeGmm(const GmmModel &model) {
  BinaryWriter w;
  w.WriteMagic("TCLG");
  w.WriteU32(kGmmFileVersion);
  w.WriteU32(static_cast<uint32_t>(model.NumComponents()));
  w.WriteU32(static_cast<uint32_t>(model.Dim()));
  w.WriteF64s(std::span<const double>(model.weights.data(), static_cast<size_t>(model.weights.size())));
  w.WriteF64s(std::span<const double>(model.means.data(), static_cast<size_t>(model.means.size())));
  w.WriteF64s(std::span<const double>(model.variances.data(), static_cast<size_t>(model.variances.size())));
  return w.bytes();
}

GmmModel DecodeGmm(std::vector<char> bytes, const std::string &what) {
  BinaryReader r(std::move(bytes), what);
  r.ExpectMagic("TCLG");
  const uint32_t version = r.ReadU32();
  if (version != kGmmFileVersion)
    throw Error(ErrorCode::kFormat, what + ": unsupported GMM version " + std::to_string(version));
  const uint32_t k = r.ReadU32();
  const uint32_t d = r.ReadU32();
  GmmModel model;
  model.weights.resize(k);
  model.means.resize(k, d);
  model.variances.resize(k, d);
  r.ReadF64s(std::span<double>(model.weights.data(), k));
  r.ReadF64s(std::span<double>(model.means.data(), static_cast<size_t>(model.means.size())));
  r.ReadF64s(std::span<double>(model.variances.data(), static_cast<size_t>(model.variances.size())));
  r.ExpectEnd();
  try {
    model.Validate();
  } catch (const Error &e) {
    throw Error(ErrorCode::kFormat, what + ": " + e.what());
  }
  return model;
}

void WriteGmm(const std::filesystem::path &path, const GmmModel &model) {
  WriteFileAtomic(path, EncodeGmm(model));
}

GmmModel ReadGmm(const std::filesystem::path &path) {
  return DecodeGmm(ReadFileBytes(path), path.string());
}

}  // namespace tclsv
