// tclsv/binary_io.h

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

#ifndef TCLSV_BINARY_IO_H_
#define TCLSV_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tclsv {

/// Little-endian byte buffer builder used by every binary artifact.
class BinaryWriter {
 public:
  void WriteMagic(std::string_view magic);
  void WriteU32(uint32_t value);
  void WriteU64(uint64_t value);
  void WriteF64(double value);
  void WriteF64s(std::span<const double> values);

  const std::vector<char> &bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

/// Bounds-checked reader over a byte buffer; throws Error(kFormat) on
/// truncation. `what` names the artifact in error messages.
class BinaryReader {
 public:
  BinaryReader(std::vector<char> bytes, std::string what);

  void ExpectMagic(std::string_view magic);
  uint32_t ReadU32();
  uint64_t ReadU64();
  double ReadF64();
  void ReadF64s(std::span<double> out);
  void ExpectEnd() const;

  const std::string &what() const { return what_; }

 private:
  void Need(size_t n) const;

  std::vector<char> bytes_;
  size_t pos_ = 0;
  std::string what_;
};

std::vector<char> ReadFileBytes(const std::filesystem::path &path);

/// Writes to a sibling temp file then renames over `path`.
void WriteFileAtomic(const std::filesystem::path &path,
                     const std::vector<char> &bytes);
void WriteFileAtomic(const std::filesystem::path &path, std::string_view text);

}  // namespace tclsv

#endif  // TCLSV_BINARY_IO_H_
