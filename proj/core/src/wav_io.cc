// src/wav_io.cc

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

#include "tclsv/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

#include "tclsv/binary_io.h"
#include "tclsv/error.h"

namespace tclsv {

namespace {

uint32_t U32At(std::span<const char> b, size_t pos) {
  uint32_t v;
  std::memcpy(&v, b.data() + pos, 4);
  return v;
}

uint16_t U16At(std::span<const char> b, size_t pos) {
  uint16_t v;
  std::memcpy(&v, b.data() + pos, 2);
  return v;
}

[[noreturn]] void Bad(const std::string &what) {
  throw Error(ErrorCode::kFormat, "wav: " + what);
}

}  // namespace

AudioSignal DecodeWav(std::span<const char> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    Bad("not a RIFF/WAVE file");

  bool have_fmt = false;
  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint32_t chunk_size = U32At(bytes, pos + 4);
    const size_t body = pos + 8;
    if (chunk_size > bytes.size() - body) Bad("chunk overruns file");
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16) Bad("short fmt chunk");
      const uint16_t format = U16At(bytes, body);
      channels = U16At(bytes, body + 2);
      rate = U32At(bytes, body + 4);
      bits = U16At(bytes, body + 14);
      if (format != 1) Bad("only PCM (format 1) is supported");
      if (channels != 1) Bad("expected mono, got " + std::to_string(channels) + " channels");
      if (bits != 16) Bad("expected 16-bit samples, got " + std::to_string(bits));
      if (rate == 0) Bad("zero sample rate");
      have_fmt = true;
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      if (!have_fmt) Bad("data chunk before fmt chunk");
      const size_t count = chunk_size / 2;
      if (count == 0) Bad("empty data chunk");
      AudioSignal signal;
      signal.sample_rate_hz = static_cast<int>(rate);
      signal.samples.resize(count);
      for (size_t i = 0; i < count; ++i) {
        int16_t s;
        std::memcpy(&s, bytes.data() + body + 2 * i, 2);
        signal.samples[i] = s / 32768.0;
      }
      return signal;
    }
    pos = body + chunk_size + (chunk_size & 1);
  }
  Bad("no data chunk");
}

AudioSignal ReadWav(const std::filesystem::path &path) {
  const std::vector<char> bytes = ReadFileBytes(path);
  try {
    return DecodeWav(bytes);
  } catch (const Error &e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<char> EncodeWav(const AudioSignal &signal) {
  BinaryWriter w;
  const uint32_t data_bytes = static_cast<uint32_t>(signal.samples.size() * 2);
  const uint32_t rate = static_cast<uint32_t>(signal.sample_rate_hz);
  w.WriteMagic("RIFF");
  w.WriteU32(36 + data_bytes);
  w.WriteMagic("WAVE");
  w.WriteMagic("fmt ");
  w.WriteU32(16);
  w.WriteU32(1u | (1u << 16));  // PCM, mono
  w.WriteU32(rate);
  w.WriteU32(rate * 2);
  w.WriteU32(2u | (16u << 16));  // block align, bits per sample
  w.WriteMagic("data");
  w.WriteU32(data_bytes);
  std::vector<char> bytes = w.bytes();
  bytes.reserve(bytes.size() + data_bytes);
  for (double x : signal.samples) {
    const double clipped = std::clamp(x, -1.0, 1.0);
    const auto s = static_cast<int16_t>(std::clamp(std::lround(clipped * 32768.0), -32768L, 32767L));
    const char *p = reinterpret_cast<const char *>(&s);
    bytes.insert(bytes.end(), p, p + 2);
  }
  return bytes;
}

void WriteWav(const std::filesystem::path &path, const AudioSignal &signal) {
  WriteFileAtomic(path, EncodeWav(signal));
}

}  // namespace tclsv
