// tclsv/synthetic_corpus.h

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

#ifndef TCLSV_SYNTHETIC_CORPUS_H_
#define TCLSV_SYNTHETIC_CORPUS_H_

// Small deterministic corpus for smoke and end-to-end tests. A "speaker" is
// a source/filter parameter set (pitch, resonance frequencies, breathiness)
// and a "phrase" is a sequence of syllables with its own temporal envelope
// and resonance shifts. Phrases listed in dnn_phrases feed DNN and UBM
// training; the remaining phrases are split into enrollment and test.

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "tclsv/audio_frontend.h"
#include "tclsv/evaluation.h"
#include "tclsv/manifest.h"

namespace tclsv {

struct SyntheticCorpusOptions {
  int num_speakers = 10;
  int num_phrases = 5;
  int repetitions = 4;      // per speaker and phrase; first half enroll / dnn-train
  int sample_rate_hz = 16000;
  uint64_t seed = 2017;
  std::vector<int> dnn_phrases = {0, 1};
};

// Desk-scale settings matching the bundled synthetic corpus.
inline constexpr std::string_view kSyntheticCorpusConfig = R"({
  "seed": 0,
  "tcl": { "mode": "utterance", "num_classes": 10, "frames_per_segment": 6 },
  "dnn": { "targets": "tcl", "hidden_layers": [64, 64], "learning_rate": 0.1,
           "epochs": 15, "minibatch_size": 64 },
  "bottleneck": { "layer": "L2", "pca_dim": 12, "pca_split": "ubm-train" },
  "backend": { "feature": "bn", "num_components": 8, "em_iterations": 10,
               "model_key": "speaker-phrase", "relevance_factor": 10.0,
               "map_iterations": 3 },
  "evaluation": { "trials": "trials.tsv" }
}
)";

struct SyntheticCorpus {
  Manifest manifest;
  std::vector<Trial> trials;
};

AudioSignal SynthesizeUtterance(const SyntheticCorpusOptions &options, int speaker,
                                int phrase, int repetition);

/// Writes wav/*.wav, manifest.tsv and trials.tsv under `dir`. Trials pair
/// every enrolled speaker-phrase model with every test utterance.
SyntheticCorpus WriteSyntheticCorpus(const std::filesystem::path &dir,
                                     const SyntheticCorpusOptions &options);

/// Writes trials in the trial-list format.
void WriteTrialList(const std::filesystem::path &path, const std::vector<Trial> &trials);

}  // namespace tclsv

#endif  // TCLSV_SYNTHETIC_CORPUS_H_
