// tclsv/feature_io.h

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

#ifndef TCLSV_FEATURE_IO_H_
#define TCLSV_FEATURE_IO_H_

// Feature archive: one file per utterance.
//   "TCLF" | u32 version | u32 T | u32 D | T*D f64, row-major, little-endian

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tclsv/types.h"

namespace tclsv {

inline constexpr uint32_t kFeatureArchiveVersion = 1;

std::vector<char> EncodeFeatureArchive(const Matrix &frames);
Matrix DecodeFeatureArchive(std::vector<char> bytes, const std::string &what);

void WriteFeatureArchive(const std::filesystem::path &path, const Matrix &frames);
Matrix ReadFeatureArchive(const std::filesystem::path &path);

}  // namespace tclsv

#endif  // TCLSV_FEATURE_IO_H_
