// tclsv/bottleneck.h

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

#ifndef TCLSV_BOTTLENECK_H_
#define TCLSV_BOTTLENECK_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tclsv/neural_net.h"
#include "tclsv/types.h"

namespace tclsv {

/// Rows of `basis` are the leading eigenvectors of the pooled covariance in
/// descending eigenvalue order. Each row's largest-magnitude entry is
/// positive so that a fit is reproducible.
struct PcaModel {
  Vector mean;
  Vector eigenvalues;
  Matrix basis;  // out_dim x in_dim

  Eigen::Index InputDim() const { return mean.size(); }
  Eigen::Index OutputDim() const { return basis.rows(); }
};

/// Population-covariance PCA. Requires more rows than out_dim. When fewer
/// than out_dim eigenvalues are positive the missing directions are left as
/// zero rows (eigenvalue 0) and a RankDeficient warning is emitted.
PcaModel FitPca(const Matrix &data, int out_dim);

/// Streaming form of FitPca for pooled data that does not fit in memory.
/// Sums are shifted by the first row seen to limit cancellation.
class PcaAccumulator {
 public:
  explicit PcaAccumulator(Eigen::Index dim);

  void Accumulate(const Matrix &rows);
  Eigen::Index Count() const { return count_; }
  PcaModel Fit(int out_dim) const;

 private:
  Eigen::Index dim_;
  Eigen::Index count_ = 0;
  Vector shift_;
  Vector sum_;
  Eigen::MatrixXd scatter_;
};

/// (x - mean) * basis^T for each row.
Matrix Project(const PcaModel &model, const Matrix &data);

/// Deep features of one utterance, normalized per utterance: context
/// stacking, hidden-layer activations, then CMVN.
Matrix NormalizedDeepFeatures(const NetworkParams &net, const Matrix &features,
                              int layer, int context_left, int context_right);

/// NormalizedDeepFeatures followed by the PCA projection.
Matrix BottleneckFeatures(const NetworkParams &net, const PcaModel &pca,
                          const Matrix &features, int layer, int context_left,
                          int context_right);

// PCA file:
//   "TCLP" | u32 version | u32 in_dim | u32 out_dim | mean | eigenvalues |
//   basis row-major, f64 little-endian
inline constexpr uint32_t kPcaFileVersion = 1;

std::vector<char> EncodePca(const PcaModel &model);
PcaModel DecodePca(std::vector<char> bytes, const std::string &what);
void WritePca(const std::filesystem::path &path, const PcaModel &model);
PcaModel ReadPca(const std::filesystem::path &path);

}  // namespace tclsv

#endif  // TCLSV_BOTTLENECK_H_
