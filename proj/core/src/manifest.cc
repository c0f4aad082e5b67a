// src/manifest.cc

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

#include "tclsv/manifest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "tclsv/binary_io.h"
#include "tclsv/error.h"

namespace tclsv {

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kDnnTrain: return "dnn-train";
    case Split::kUbmTrain: return "ubm-train";
    case Split::kEnroll: return "enroll";
    case Split::kTest: return "test";
  }
  return "?";
}

Split ParseSplit(std::string_view name) {
  for (Split s : {Split::kDnnTrain, Split::kUbmTrain, Split::kEnroll, Split::kTest})
    if (name == SplitName(s)) return s;
  throw Error(ErrorCode::kFormat, "unknown split '" + std::string(name) + "'");
}

std::vector<ManifestEntry> Manifest::Select(Split split) const {
  std::vector<ManifestEntry> out;
  for (const auto &e : entries)
    if (e.split == split) out.push_back(e);
  return out;
}

Manifest ReadManifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "manifest " + path.string());
  const auto base = path.parent_path();
  Manifest manifest;
  std::set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (lineno == 1) {
      if (line != kManifestHeader)
        throw Error(ErrorCode::kFormat, where + ": expected header '" +
                                            std::string(kManifestHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, '\t')) fields.push_back(field);
    if (line.back() == '\t') fields.emplace_back();
    if (fields.size() != 5) throw Error(ErrorCode::kFormat, where + ": expected 5 fields");
    ManifestEntry e;
    e.utterance_id = fields[0];
    e.wav_path = fields[1];
    if (e.wav_path.is_relative()) e.wav_path = base / e.wav_path;
    e.speaker_id = fields[2];
    e.phrase_id = fields[3] == "-" ? "" : fields[3];
    e.split = ParseSplit(fields[4]);
    if (e.utterance_id.empty() || e.utterance_id.find('/') != std::string::npos)
      throw Error(ErrorCode::kFormat, where + ": invalid utterance_id");
    if (!seen.insert(e.utterance_id).second)
      throw Error(ErrorCode::kFormat, where + ": duplicate utterance_id " + e.utterance_id);
    manifest.entries.push_back(std::move(e));
  }
  if (lineno == 0) throw Error(ErrorCode::kFormat, path.string() + ": missing header");
  return manifest;
}

void WriteManifest(const std::filesystem::path &path, const Manifest &manifest) {
  const auto base = path.parent_path();
  std::ostringstream os;
  os << kManifestHeader << '\n';
  for (const auto &e : manifest.entries) {
    std::filesystem::path p = e.wav_path;
    if (!base.empty()) {
      const auto rel = std::filesystem::relative(p, base);
      if (!rel.empty()) p = rel;
    }
    os << e.utterance_id << '\t' << p.generic_string() << '\t' << e.speaker_id << '\t'
       << (e.phrase_id.empty() ? "-" : e.phrase_id) << '\t' << SplitName(e.split) << '\n';
  }
  WriteFileAtomic(path, os.str());
}

void LintPhraseSplit(const Manifest &manifest) {
  std::set<std::string> dnn_phrases;
  for (const auto &e : manifest.entries)
    if (e.split == Split::kDnnTrain && !e.phrase_id.empty()) dnn_phrases.insert(e.phrase_id);
  for (const auto &e : manifest.entries) {
    if ((e.split == Split::kEnroll || e.split == Split::kTest) && dnn_phrases.count(e.phrase_id))
      throw Error(ErrorCode::kInvalidArgument,
                  "manifest lint: phrase '" + e.phrase_id + "' is used for DNN training and in " +
                      std::string(SplitName(e.split)) + " (utterance " + e.utterance_id + ")");
  }
}

}  // namespace tclsv
