// tclsv/config.h

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

#ifndef TCLSV_CONFIG_H_
#define TCLSV_CONFIG_H_

// Experiment configuration, stored as a JSON object tree. Every key is
// optional; missing keys take the defaults below and unknown keys are
// rejected. The resolved tree is written next to every stage output.
//
// {
//   "seed": 0,
//   "workers": 0,                        // 0: hardware concurrency
//   "frontend":   { "frame_shift_ms", "frame_length_ms", "num_static_ceps",
//                   "num_mel_filters", "preemphasis_coeff", "rasta_enabled",
//                   "vad_threshold_db", "delta_window" },
//   "tcl":        { "mode": "utterance"|"stream", "num_classes",
//                   "frames_per_segment" },
//   "dnn":        { "targets": "tcl"|"speaker"|"speaker+phrase",
//                   "hidden_layers": [..], "context_left", "context_right",
//                   "learning_rate", "epochs", "minibatch_size",
//                   "task_weights": [..] },
//   "bottleneck": { "layer": "L2", "pca_dim": 57, "pca_split": "ubm-train" },
//   "backend":    { "feature": "bn"|"mfcc", "num_components",
//                   "em_iterations", "model_key": "speaker-phrase"|"speaker",
//                   "relevance_factor", "map_iterations" },
//   "evaluation": { "trials": "<path relative to the config file>",
//                   "p_target", "cost_miss", "cost_fa" }
// }
//
// Component seeds derive from "seed": TCL shuffle = seed, DNN init =
// seed + 1, minibatch shuffle = seed + 2, UBM init = seed + 3.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tclsv/audio_frontend.h"
#include "tclsv/evaluation.h"
#include "tclsv/gmm.h"
#include "tclsv/manifest.h"
#include "tclsv/neural_net.h"
#include "tclsv/tcl_labeling.h"

namespace tclsv {

enum class DnnTargets { kTcl, kSpeaker, kSpeakerPhrase };
enum class BackendFeature { kBottleneck, kMfcc };
enum class ModelKey { kSpeakerPhrase, kSpeaker };

struct DnnConfig {
  DnnTargets targets = DnnTargets::kTcl;
  std::vector<int> hidden_layers = std::vector<int>(6, 1024);
  int context_left = 5;
  int context_right = 5;
  TrainConfig train;  // seeds filled from the experiment seed
};

struct BottleneckConfig {
  std::string layer = "L2";
  int pca_dim = 57;
  Split pca_split = Split::kUbmTrain;
};

struct BackendConfig {
  BackendFeature feature = BackendFeature::kBottleneck;
  int num_components = 512;
  int em_iterations = 10;
  ModelKey model_key = ModelKey::kSpeakerPhrase;
  MapConfig map;
};

struct EvaluationConfig {
  std::string trials;                   // as written in the config file
  std::filesystem::path trials_path;    // resolved, not serialized
  DcfParams dcf;
};

struct ExperimentConfig {
  uint64_t seed = 0;
  int workers = 0;
  FrontendConfig frontend;
  TclConfig tcl;
  DnnConfig dnn;
  BottleneckConfig bottleneck;
  BackendConfig backend;
  EvaluationConfig evaluation;

  uint64_t DnnInitSeed() const { return seed + 1; }
  uint64_t UbmSeed() const { return seed + 3; }
  /// Overrides the master seed and every seed derived from it.
  void SetSeed(uint64_t s);
  void Validate() const;
};

/// Parses a JSON config; `base_dir` resolves evaluation.trials.
ExperimentConfig ParseConfig(const std::string &json_text,
                             const std::filesystem::path &base_dir);
ExperimentConfig LoadConfig(const std::filesystem::path &path);
/// Deterministic serialization (sorted keys, fixed formatting).
std::string SerializeConfig(const ExperimentConfig &config);

}  // namespace tclsv

#endif  // TCLSV_CONFIG_H_
