// src/error.cc

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

#include "tclsv/error.h"

#include <atomic>
#include <iostream>

namespace tclsv {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSignalTooShort: return "SignalTooShort";
    case ErrorCode::kAllFramesRemoved: return "AllFramesRemoved";
    case ErrorCode::kInsufficientFrames: return "InsufficientFrames";
    case ErrorCode::kUtteranceTooShort: return "UtteranceTooShort";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnknownLayer: return "UnknownLayer";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kTooFewFrames: return "TooFewFrames";
    case ErrorCode::kEmptyEnrollment: return "EmptyEnrollment";
    case ErrorCode::kEmptyUtterance: return "EmptyUtterance";
    case ErrorCode::kEmptyScoreList: return "EmptyScoreList";
    case ErrorCode::kMissingTargets: return "MissingTargets";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

namespace {

void DefaultSink(std::string_view message) {
  std::cerr << "WARNING: " << message << '\n';
}

std::atomic<WarningSink> g_sink{&DefaultSink};

}  // namespace

void SetWarningSink(WarningSink sink) {
  g_sink.store(sink ? sink : &DefaultSink);
}

void Warn(std::string_view message) { g_sink.load()(message); }

}  // namespace tclsv
