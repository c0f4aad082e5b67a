// src/bottleneck.cc

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

#include "tclsv/bottleneck.h"

#include <cmath>
#include <span>

#include <Eigen/Eigenvalues>

#include "tclsv/audio_frontend.h"
#include "tclsv/binary_io.h"
#include "tclsv/error.h"

namespace tclsv {

namespace {

void CheckFitShape(Eigen::Index rows, Eigen::Index dim, int out_dim) {
  if (out_dim < 1 || out_dim > dim)
    throw Error(ErrorCode::kInvalidArgument,
                "pca: out_dim " + std::to_string(out_dim) + " for input dim " + std::to_string(dim));
  if (rows <= out_dim)
    throw Error(ErrorCode::kTooFewFrames,
                "pca: " + std::to_string(rows) + " rows, need more than " + std::to_string(out_dim));
}

PcaModel FitFromCovariance(const Vector &mean, const Eigen::MatrixXd &cov, int out_dim) {
  const Eigen::Index dim = cov.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::kRankDeficient, "pca: eigendecomposition failed");

  // Eigen returns ascending order.
  const Eigen::VectorXd &values = solver.eigenvalues();
  const Eigen::MatrixXd &vectors = solver.eigenvectors();
  const double largest = std::max(values[dim - 1], 0.0);
  const double tol = largest * 1e-12;

  PcaModel model;
  model.mean = mean;
  model.eigenvalues = Vector::Zero(out_dim);
  model.basis = Matrix::Zero(out_dim, dim);
  int rank = 0;
  for (int k = 0; k < out_dim; ++k) {
    const Eigen::Index src = dim - 1 - k;
    if (largest == 0.0 || !(values[src] > tol)) break;
    Eigen::VectorXd v = vectors.col(src);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    model.basis.row(k) = v.transpose();
    model.eigenvalues[k] = values[src];
    ++rank;
  }
  if (rank < out_dim)
    Warn("pca: RankDeficient, only " + std::to_string(rank) + " of " +
         std::to_string(out_dim) + " eigenvalues are positive; padding with zero rows");
  return model;
}

}  // namespace

PcaModel FitPca(const Matrix &data, int out_dim) {
  CheckFitShape(data.rows(), data.cols(), out_dim);
  const Vector mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(data.rows());
  return FitFromCovariance(mean, cov, out_dim);
}

PcaAccumulator::PcaAccumulator(Eigen::Index dim)
    : dim_(dim), shift_(Vector::Zero(dim)), sum_(Vector::Zero(dim)),
      scatter_(Eigen::MatrixXd::Zero(dim, dim)) {}

void PcaAccumulator::Accumulate(const Matrix &rows) {
  if (rows.cols() != dim_)
    throw Error(ErrorCode::kDimensionMismatch, "pca accumulator: input width");
  if (rows.rows() == 0) return;
  if (count_ == 0) shift_ = rows.row(0).transpose();
  const Matrix shifted = rows.rowwise() - shift_.transpose();
  sum_ += shifted.colwise().sum().transpose();
  scatter_.noalias() += shifted.transpose() * shifted;
  count_ += rows.rows();
}

PcaModel PcaAccumulator::Fit(int out_dim) const {
  CheckFitShape(count_, dim_, out_dim);
  const double n = static_cast<double>(count_);
  const Vector mean_shifted = sum_ / n;
  const Eigen::MatrixXd cov = scatter_ / n - mean_shifted * mean_shifted.transpose();
  return FitFromCovariance(shift_ + mean_shifted, cov, out_dim);
}

Matrix Project(const PcaModel &model, const Matrix &data) {
  if (data.cols() != model.InputDim())
    throw Error(ErrorCode::kDimensionMismatch,
                "pca: input width " + std::to_string(data.cols()) + " != " +
                    std::to_string(model.InputDim()));
  return (data.rowwise() - model.mean.transpose()) * model.basis.transpose();
}

Matrix NormalizedDeepFeatures(const NetworkParams &net, const Matrix &features,
                              int layer, int context_left, int context_right) {
  const Matrix stacked = StackContext(features, context_left, context_right);
  return Cmvn(ExtractDeepFeatures(net, stacked, layer));
}

Matrix BottleneckFeatures(const NetworkParams &net, const PcaModel &pca,
                          const Matrix &features, int layer, int context_left,
                          int context_right) {
  return Project(pca, NormalizedDeepFeatures(net, features, layer, context_left, context_right));
}

std::vector<char> EncodePca(const PcaModel &model) {
  BinaryWriter w;
  w.WriteMagic("TCLP");
  w.WriteU32(kPcaFileVersion);
  w.WriteU32(static_cast<uint32_t>(model.InputDim()));
  w.WriteU32(static_cast<uint32_t>(model.OutputDim()));
  w.WriteF64s(std::span<const double>(model.mean.data(), static_cast<size_t>(model.mean.size())));
  w.WriteF64s(std::span<const double>(model.eigenvalues.data(),
                                      static_cast<size_t>(model.eigenvalues.size())));
  w.WriteF64s(std::span<const double>(model.basis.data(), static_cast<size_t>(model.basis.size())));
  return w.bytes();
}

PcaModel DecodePca(std::vector<char> bytes, const std::string &what) {
  BinaryReader r(std::move(bytes), what);
  r.ExpectMagic("TCLP");
  const uint32_t version = r.ReadU32();
  if (version != kPcaFileVersion)
    throw Error(ErrorCode::kFormat, what + ": unsupported PCA version " + std::to_string(version));
  const uint32_t in_dim = r.ReadU32();
  const uint32_t out_dim = r.ReadU32();
  PcaModel model;
  model.mean.resize(in_dim);
  model.eigenvalues.resize(out_dim);
  model.basis.resize(out_dim, in_dim);
  r.ReadF64s(std::span<double>(model.mean.data(), in_dim));
  r.ReadF64s(std::span<double>(model.eigenvalues.data(), out_dim));
  r.ReadF64s(std::span<double>(model.basis.data(), static_cast<size_t>(model.basis.size())));
  r.ExpectEnd();
  return model;
}

void WritePca(const std::filesystem::path &path, const PcaModel &model) {
  WriteFileAtomic(path, EncodePca(model));
}

PcaModel ReadPca(const std::filesystem::path &path) {
  return DecodePca(ReadFileBytes(path), path.string());
}

}  // namespace tclsv
