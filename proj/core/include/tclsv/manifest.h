// tclsv/manifest.h

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

#ifndef TCLSV_MANIFEST_H_
#define TCLSV_MANIFEST_H_

// Corpus manifest: tab-separated text with a header line
//   utterance_id  wav_path  speaker_id  phrase_id  split
// Relative wav paths are resolved against the manifest's directory. An
// empty phrase_id (or "-") means the phrase is unknown.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tclsv {

enum class Split { kDnnTrain, kUbmTrain, kEnroll, kTest };

std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct ManifestEntry {
  std::string utterance_id;
  std::filesystem::path wav_path;
  std::string speaker_id;
  std::string phrase_id;
  Split split = Split::kDnnTrain;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  /// Entries of one split, in manifest order.
  std::vector<ManifestEntry> Select(Split split) const;
};

inline constexpr std::string_view kManifestHeader =
    "utterance_id\twav_path\tspeaker_id\tphrase_id\tsplit";

/// Throws Error(kFormat) on a bad header or row and on duplicate ids.
Manifest ReadManifest(const std::filesystem::path &path);
/// Paths are written relative to `path`'s directory when possible.
void WriteManifest(const std::filesystem::path &path, const Manifest &manifest);

/// Pass-phrases used for DNN training must not appear in enroll or test.
/// Throws Error(kInvalidArgument) naming the first offending phrase.
void LintPhraseSplit(const Manifest &manifest);

}  // namespace tclsv

#endif  // TCLSV_MANIFEST_H_
