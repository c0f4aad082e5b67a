// tclsv/tcl_labeling.h

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

#ifndef TCLSV_TCL_LABELING_H_
#define TCLSV_TCL_LABELING_H_

// Time-contrastive labels: frames in the same temporal segment share a
// class, and a classifier is later trained to tell segments apart.
//
//  - Stream mode: utterances are concatenated in a seeded random order, the
//    stream is cut into segments of d frames and segment j gets class
//    j mod N. A trailing run shorter than d frames is left unlabeled.
//  - Utterance mode: each utterance is cut into N contiguous segments of
//    near-equal length (the first T mod N segments get one extra frame) and
//    segment n gets class n.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tclsv/audio_frontend.h"

namespace tclsv {

enum class TclMode { kStream, kUtterance };

struct TclConfig {
  int num_classes = 10;        // N
  int frames_per_segment = 6;  // d, stream mode only
  TclMode mode = TclMode::kUtterance;
  uint64_t shuffle_seed = 0;

  void Validate() const;
};

/// Label value for frames that carry no class (sTCL remainder).
inline constexpr int kNoLabel = -1;

struct LabeledFrames {
  Matrix features;                  // labeled frames only, in stream order
  std::vector<int> labels;          // one per row of `features`
  std::vector<size_t> utterance_boundaries;  // row offset where each utterance starts
  std::vector<std::string> utterance_ids;    // aligned with boundaries
  /// Per input utterance (input order), one entry per input frame; kNoLabel
  /// marks frames that were dropped or utterances that were skipped.
  std::vector<std::vector<int>> per_utterance_labels;
};

LabeledFrames AssignStreamLabels(const std::vector<FeatureMatrix> &utterances,
                                 const TclConfig &config);

/// Throws UtteranceTooShort when T < num_classes.
LabeledFrames AssignUtteranceLabels(const FeatureMatrix &utterance, int num_classes);

/// Utterance mode over a whole set; utterances shorter than N frames are
/// skipped with a warning.
LabeledFrames AssignUtteranceLabels(const std::vector<FeatureMatrix> &utterances,
                                    int num_classes);

/// Dispatches on config.mode.
LabeledFrames AssignTclLabels(const std::vector<FeatureMatrix> &utterances,
                              const TclConfig &config);

/// Segment lengths used by utterance mode for T frames and N classes.
std::vector<int> UtteranceSegmentLengths(int num_frames, int num_classes);

/// Frame counts for classes 0..num_classes-1 (kNoLabel ignored).
std::vector<size_t> SummarizeLabelDistribution(const LabeledFrames &labeled,
                                               int num_classes);

// Label archive: one line per utterance, "<utterance_id>\t<labels...>".
using LabelArchive = std::map<std::string, std::vector<int>>;

void WriteLabelArchive(const std::filesystem::path &path,
                       const std::vector<std::string> &utterance_ids,
                       const std::vector<std::vector<int>> &labels);
LabelArchive ReadLabelArchive(const std::filesystem::path &path);

}  // namespace tclsv

#endif  // TCLSV_TCL_LABELING_H_
