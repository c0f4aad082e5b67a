// src/tcl_labeling.cc

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

#include "tclsv/tcl_labeling.h"

#include <fstream>
#include <numeric>
#include <sstream>

#include "tclsv/binary_io.h"
#include "tclsv/error.h"
#include "tclsv/random.h"

namespace tclsv {

void TclConfig::Validate() const {
  if (num_classes < 2)
    throw Error(ErrorCode::kInvalidArgument, "tcl: num_classes must be >= 2");
  if (frames_per_segment < 1)
    throw Error(ErrorCode::kInvalidArgument, "tcl: frames_per_segment must be >= 1");
}

LabeledFrames AssignStreamLabels(const std::vector<FeatureMatrix> &utterances,
                                 const TclConfig &config) {
  config.Validate();
  const int d = config.frames_per_segment;
  const int n = config.num_classes;

  size_t total = 0;
  for (const auto &u : utterances) total += static_cast<size_t>(u.NumFrames());
  if (total < static_cast<size_t>(d))
    throw Error(ErrorCode::kInsufficientFrames,
                std::to_string(total) + " frames in stream, segment needs " +
                    std::to_string(d));

  std::vector<size_t> order(utterances.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(config.shuffle_seed);
  rng.Shuffle(std::span<size_t>(order));

  const size_t labeled = total / d * d;
  const Eigen::Index dim = utterances[order.front()].Dim();

  LabeledFrames out;
  out.features.resize(static_cast<Eigen::Index>(labeled), dim);
  out.labels.reserve(labeled);
  out.per_utterance_labels.resize(utterances.size());

  size_t f = 0;
  for (size_t idx : order) {
    const FeatureMatrix &u = utterances[idx];
    if (u.Dim() != dim)
      throw Error(ErrorCode::kDimensionMismatch, "utterance " + u.utterance_id);
    auto &line = out.per_utterance_labels[idx];
    line.assign(static_cast<size_t>(u.NumFrames()), kNoLabel);
    if (f < labeled) {
      out.utterance_boundaries.push_back(f);
      out.utterance_ids.push_back(u.utterance_id);
    }
    for (Eigen::Index t = 0; t < u.NumFrames(); ++t, ++f) {
      if (f >= labeled) continue;
      const int label = static_cast<int>((f / d) % n);
      line[static_cast<size_t>(t)] = label;
      out.features.row(static_cast<Eigen::Index>(f)) = u.frames.row(t);
      out.labels.push_back(label);
    }
  }
  return out;
}

std::vector<int> UtteranceSegmentLengths(int num_frames, int num_classes) {
  std::vector<int> lengths(num_classes, num_frames / num_classes);
  for (int i = 0; i < num_frames % num_classes; ++i) ++lengths[i];
  return lengths;
}

LabeledFrames AssignUtteranceLabels(const FeatureMatrix &utterance, int num_classes) {
  if (num_classes < 2)
    throw Error(ErrorCode::kInvalidArgument, "tcl: num_classes must be >= 2");
  const int num_frames = static_cast<int>(utterance.NumFrames());
  if (num_frames < num_classes)
    throw Error(ErrorCode::kUtteranceTooShort,
                utterance.utterance_id + ": " + std::to_string(num_frames) +
                    " frames < " + std::to_string(num_classes) + " classes");
  LabeledFrames out;
  out.features = utterance.frames;
  out.labels.reserve(static_cast<size_t>(num_frames));
  const auto lengths = UtteranceSegmentLengths(num_frames, num_classes);
  for (int c = 0; c < num_classes; ++c) out.labels.insert(out.labels.end(), lengths[c], c);
  out.utterance_boundaries = {0};
  out.utterance_ids = {utterance.utterance_id};
  out.per_utterance_labels = {out.labels};
  return out;
}

LabeledFrames AssignUtteranceLabels(const std::vector<FeatureMatrix> &utterances,
                                    int num_classes) {
  LabeledFrames out;
  out.per_utterance_labels.resize(utterances.size());
  std::vector<LabeledFrames> parts;
  Eigen::Index rows = 0, dim = -1;
  for (size_t i = 0; i < utterances.size(); ++i) {
    const FeatureMatrix &u = utterances[i];
    if (u.NumFrames() < num_classes) {
      Warn("tcl: skipping " + u.utterance_id + " (" + std::to_string(u.NumFrames()) +
           " frames < " + std::to_string(num_classes) + " classes)");
      out.per_utterance_labels[i].assign(static_cast<size_t>(u.NumFrames()), kNoLabel);
      continue;
    }
    if (dim >= 0 && u.Dim() != dim)
      throw Error(ErrorCode::kDimensionMismatch, "utterance " + u.utterance_id);
    dim = u.Dim();
    parts.push_back(AssignUtteranceLabels(u, num_classes));
    out.per_utterance_labels[i] = parts.back().labels;
    rows += u.NumFrames();
  }
  out.features.resize(rows, std::max<Eigen::Index>(dim, 0));
  Eigen::Index r = 0;
  for (auto &p : parts) {
    out.utterance_boundaries.push_back(static_cast<size_t>(r));
    out.utterance_ids.push_back(p.utterance_ids.front());
    out.features.middleRows(r, p.features.rows()) = p.features;
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    r += p.features.rows();
  }
  return out;
}

LabeledFrames AssignTclLabels(const std::vector<FeatureMatrix> &utterances,
                              const TclConfig &config) {
  config.Validate();
  return config.mode == TclMode::kStream
             ? AssignStreamLabels(utterances, config)
             : AssignUtteranceLabels(utterances, config.num_classes);
}

std::vector<size_t> SummarizeLabelDistribution(const LabeledFrames &labeled,
                                               int num_classes) {
  std::vector<size_t> counts(static_cast<size_t>(num_classes), 0);
  for (int label : labeled.labels)
    if (label >= 0 && label < num_classes) ++counts[static_cast<size_t>(label)];
  return counts;
}

void WriteLabelArchive(const std::filesystem::path &path,
                       const std::vector<std::string> &utterance_ids,
                       const std::vector<std::vector<int>> &labels) {
  if (utterance_ids.size() != labels.size())
    throw Error(ErrorCode::kDimensionMismatch, "label archive: ids and label lists differ");
  std::ostringstream os;
  for (size_t i = 0; i < labels.size(); ++i) {
    os << utterance_ids[i] << '\t';
    for (size_t t = 0; t < labels[i].size(); ++t) os << (t ? " " : "") << labels[i][t];
    os << '\n';
  }
  WriteFileAtomic(path, os.str());
}

LabelArchive ReadLabelArchive(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "label archive " + path.string());
  LabelArchive archive;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(lineno) +
                                          ": expected <id>\\t<labels>");
    std::vector<int> labels;
    std::istringstream ls(line.substr(tab + 1));
    int v;
    while (ls >> v) labels.push_back(v);
    if (!ls.eof())
      throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(lineno) +
                                          ": non-integer label");
    if (!archive.emplace(line.substr(0, tab), std::move(labels)).second)
      throw Error(ErrorCode::kFormat, path.string() + ": duplicate id " + line.substr(0, tab));
  }
  return archive;
}

}  // namespace tclsv
