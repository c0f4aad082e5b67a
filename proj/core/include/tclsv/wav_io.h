// tclsv/wav_io.h

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

#ifndef TCLSV_WAV_IO_H_
#define TCLSV_WAV_IO_H_

#include <filesystem>
#include <span>
#include <vector>

#include "tclsv/audio_frontend.h"

namespace tclsv {

/// Decodes a RIFF/WAVE buffer. Only mono 16-bit signed PCM is accepted;
/// anything else throws Error(kFormat).
AudioSignal DecodeWav(std::span<const char> bytes);
AudioSignal ReadWav(const std::filesystem::path &path);

/// Encodes mono 16-bit PCM; samples are clipped to [-1, 1].
std::vector<char> EncodeWav(const AudioSignal &signal);
void WriteWav(const std::filesystem::path &path, const AudioSignal &signal);

}  // namespace tclsv

#endif  // TCLSV_WAV_IO_H_
