// tclsv/pipeline.h

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

#ifndef TCLSV_PIPELINE_H_
#define TCLSV_PIPELINE_H_

// Experiment stages. All stages share one output directory:
//
//   features/<utt>.tclf   MFCC archives, failures.tsv
//   labels/<head>.txt     label archives, heads.tsv, <head>.classes
//   dnn/model.tcln        trained network, loss_trace.txt
//   bn/pca.tclp           PCA model, bn/features/<utt>.tclf
//   ubm/ubm.tclg          background model, loglik_trace.txt
//   models/<id>.tclg      enrolled models, models.tsv
//   scores/scores.txt     trial scores
//   report/report.txt     human-readable table, report/report.kv
//
// Each stage directory also receives config.json, the resolved
// configuration the stage ran with.

#include <filesystem>
#include <string>
#include <vector>

#include "tclsv/config.h"
#include "tclsv/evaluation.h"
#include "tclsv/manifest.h"

namespace tclsv {

struct PipelineContext {
  Manifest manifest;
  ExperimentConfig config;
  std::filesystem::path out_dir;
  bool deterministic = false;  // single worker, fixed processing order
};

struct FeatureFailure {
  std::string utterance_id;
  std::string message;
};

struct ExtractFeaturesResult {
  size_t num_written = 0;
  std::vector<FeatureFailure> failures;  // sorted by utterance id
};

/// One archive per manifest entry; per-utterance failures are collected in
/// features/failures.tsv and do not stop the run.
ExtractFeaturesResult RunExtractFeatures(const PipelineContext &ctx);
void RunMakeLabels(const PipelineContext &ctx);
void RunTrainDnn(const PipelineContext &ctx);
void RunExtractBottleneck(const PipelineContext &ctx);
void RunTrainUbm(const PipelineContext &ctx);
void RunEnroll(const PipelineContext &ctx);
void RunScore(const PipelineContext &ctx);
EvaluationReport RunEvaluate(const PipelineContext &ctx);

/// All stages in order; the bottleneck stages are skipped when the backend
/// uses MFCCs directly.
EvaluationReport RunAll(const PipelineContext &ctx);

/// Model id of a manifest entry under the configured key.
std::string ModelIdFor(const ManifestEntry &entry, ModelKey key);

}  // namespace tclsv

#endif  // TCLSV_PIPELINE_H_
