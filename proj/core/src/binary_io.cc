// src/binary_io.cc

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

#include "tclsv/binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tclsv/error.h"

namespace tclsv {

static_assert(std::endian::native == std::endian::little,
              "artifact I/O assumes a little-endian host");

namespace {

template <typename T>
void AppendRaw(std::vector<char> &bytes, T value) {
  const char *p = reinterpret_cast<const char *>(&value);
  bytes.insert(bytes.end(), p, p + sizeof(T));
}

}  // namespace

void BinaryWriter::WriteMagic(std::string_view magic) {
  bytes_.insert(bytes_.end(), magic.begin(), magic.end());
}

void BinaryWriter::WriteU32(uint32_t value) { AppendRaw(bytes_, value); }
void BinaryWriter::WriteU64(uint64_t value) { AppendRaw(bytes_, value); }
void BinaryWriter::WriteF64(double value) { AppendRaw(bytes_, value); }

void BinaryWriter::WriteF64s(std::span<const double> values) {
  const char *p = reinterpret_cast<const char *>(values.data());
  bytes_.insert(bytes_.end(), p, p + values.size_bytes());
}

BinaryReader::BinaryReader(std::vector<char> bytes, std::string what)
    : bytes_(std::move(bytes)), what_(std::move(what)) {}

void BinaryReader::Need(size_t n) const {
  if (bytes_.size() - pos_ < n)
    throw Error(ErrorCode::kFormat, what_ + ": truncated file");
}

void BinaryReader::ExpectMagic(std::string_view magic) {
  Need(magic.size());
  if (std::memcmp(bytes_.data() + pos_, magic.data(), magic.size()) != 0)
    throw Error(ErrorCode::kFormat,
                what_ + ": bad magic, expected \"" + std::string(magic) + "\"");
  pos_ += magic.size();
}

uint32_t BinaryReader::ReadU32() {
  Need(4);
  uint32_t v;
  std::memcpy(&v, bytes_.data() + pos_, 4);
  pos_ += 4;
  return v;
}

uint64_t BinaryReader::ReadU64() {
  Need(8);
  uint64_t v;
  std::memcpy(&v, bytes_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

double BinaryReader::ReadF64() {
  Need(8);
  double v;
  std::memcpy(&v, bytes_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

void BinaryReader::ReadF64s(std::span<double> out) {
  Need(out.size_bytes());
  std::memcpy(out.data(), bytes_.data() + pos_, out.size_bytes());
  pos_ += out.size_bytes();
}

void BinaryReader::ExpectEnd() const {
  if (pos_ != bytes_.size())
    throw Error(ErrorCode::kFormat, what_ + ": trailing bytes after payload");
}

std::vector<char> ReadFileBytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
}

void WriteFileAtomic(const std::filesystem::path &path,
                     const std::vector<char> &bytes) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void WriteFileAtomic(const std::filesystem::path &path, std::string_view text) {
  WriteFileAtomic(path, std::vector<char>(text.begin(), text.end()));
}

}  // namespace tclsv
