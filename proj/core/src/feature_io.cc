// src/feature_io.cc

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

#include "tclsv/feature_io.h"

#include <span>
#include <string>

#include "tclsv/binary_io.h"
#include "tclsv/error.h"

namespace tclsv {

std::vector<char> EncodeFeatureArchive(const Matrix &frames) {
  BinaryWriter w;
  w.WriteMagic("TCLF");
  w.WriteU32(kFeatureArchiveVersion);
  w.WriteU32(static_cast<uint32_t>(frames.rows()));
  w.WriteU32(static_cast<uint32_t>(frames.cols()));
  w.WriteF64s(std::span<const double>(frames.data(), static_cast<size_t>(frames.size())));
  return w.bytes();
}

Matrix DecodeFeatureArchive(std::vector<char> bytes, const std::string &what) {
  BinaryReader r(std::move(bytes), what);
  r.ExpectMagic("TCLF");
  const uint32_t version = r.ReadU32();
  if (version != kFeatureArchiveVersion)
    throw Error(ErrorCode::kFormat, what + ": unsupported feature archive version " +
                                        std::to_string(version));
  const uint32_t rows = r.ReadU32();
  const uint32_t cols = r.ReadU32();
  Matrix frames(rows, cols);
  r.ReadF64s(std::span<double>(frames.data(), static_cast<size_t>(frames.size())));
  r.ExpectEnd();
  return frames;
}

void WriteFeatureArchive(const std::filesystem::path &path, const Matrix &frames) {
  WriteFileAtomic(path, EncodeFeatureArchive(frames));
}

Matrix ReadFeatureArchive(const std::filesystem::path &path) {
  return DecodeFeatureArchive(ReadFileBytes(path), path.string());
}

}  // namespace tclsv
