// tclsv/gmm.h

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

#ifndef TCLSV_GMM_H_
#define TCLSV_GMM_H_

// Diagonal-covariance GMM: EM training of the universal background model,
// mean-only MAP enrollment and frame-averaged log-likelihood-ratio scoring.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tclsv/types.h"

namespace tclsv {

struct GmmModel {
  Vector weights;     // K, sums to 1
  Matrix means;       // K x D
  Matrix variances;   // K x D, diagonal covariances

  Eigen::Index NumComponents() const { return weights.size(); }
  Eigen::Index Dim() const { return means.cols(); }
  /// Throws Error(kInvalidArgument) on inconsistent shapes, non-positive
  /// variances, negative weights or weights not summing to 1.
  void Validate() const;
};

struct MapConfig {
  double relevance_factor = 10.0;
  int iterations = 3;

  void Validate() const;
};

struct EmStepResult {
  GmmModel model;
  double log_likelihood = 0.0;  // total, evaluated before the update
};

struct UbmTrainResult {
  GmmModel model;
  std::vector<double> log_likelihood_trace;  // one entry per EM step
  Vector variance_floor;
};

/// Per-dimension floor = fraction x global variance of `data`.
Vector VarianceFloor(const Matrix &data, double fraction = 1e-3);

/// k-means++ seeding followed by Lloyd iterations; uniform weights and the
/// global per-dimension variance for every component.
GmmModel InitGmm(const Matrix &data, int num_components, uint64_t seed,
                 int lloyd_iterations = 10);

/// T x K matrix of log(w_k N(x_t; mu_k, Sigma_k)).
Matrix ComponentLogLikelihoods(const GmmModel &model, const Matrix &data);

/// Posterior responsibilities (T x K, rows sum to 1). When `total` is given
/// it receives the summed frame log-likelihood.
Matrix Responsibilities(const GmmModel &model, const Matrix &data, double *total = nullptr);

/// One EM iteration with the variance floor applied in the M-step.
EmStepResult EmStep(const GmmModel &model, const Matrix &data, const Vector &variance_floor);

/// InitGmm followed by `em_iterations` EM steps; floor = 1e-3 x global variance.
UbmTrainResult TrainUbm(const Matrix &data, int num_components, int em_iterations,
                        uint64_t seed);

/// Mean-only MAP adaptation. Each iteration re-aligns the enrollment data to
/// the current (partially adapted) model, then for every component
///   alpha_k = n_k / (n_k + r),  mu_k <- alpha_k E_k[x] + (1 - alpha_k) mu_k.
/// Weights and variances are copied from `ubm` unchanged.
GmmModel MapAdapt(const GmmModel &ubm, const Matrix &enrollment, const MapConfig &config);

/// log sum_k w_k N(frame; mu_k, diag(var_k)).
double LogLikelihood(const GmmModel &model, const RowVector &frame);
Vector FrameLogLikelihoods(const GmmModel &model, const Matrix &data);

/// (1/T) sum_t [log p(y_t | target) - log p(y_t | ubm)].
double ScoreLlr(const GmmModel &target, const GmmModel &ubm, const Matrix &utterance);

// GMM file:
//   "TCLG" | u32 version | u32 K | u32 D | weights | means | variances,
//   f64 little-endian, matrices row-major
inline constexpr uint32_t kGmmFileVersion = 1;

std::vector<char> EncodeGmm(const GmmModel &model);
GmmModel DecodeGmm(std::vector<char> bytes, const std::string &what);
void WriteGmm(const std::filesystem::path &path, const GmmModel &model);
GmmModel ReadGmm(const std::filesystem::path &path);

}  // namespace tclsv

#endif  // TCLSV_GMM_H_
