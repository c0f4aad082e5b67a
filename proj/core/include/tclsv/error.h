// tclsv/error.h

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

#ifndef TCLSV_ERROR_H_
#define TCLSV_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tclsv {

enum class ErrorCode {
  kSignalTooShort,
  kAllFramesRemoved,
  kInsufficientFrames,
  kUtteranceTooShort,
  kDimensionMismatch,
  kUnknownLayer,
  kRankDeficient,
  kTooFewFrames,
  kEmptyEnrollment,
  kEmptyUtterance,
  kEmptyScoreList,
  kMissingTargets,
  kFormat,       // malformed or wrong-version file
  kInvalidArgument,
  kMissingArtifact,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

/// All toolkit failures are reported through this exception. The code lets
/// callers (and the CLI exit-code mapping) distinguish data problems from
/// programming errors without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Warnings go to stderr; set a sink to capture them (tests, CLI report).
using WarningSink = void (*)(std::string_view message);
void SetWarningSink(WarningSink sink);
void Warn(std::string_view message);

}  // namespace tclsv

#endif  // TCLSV_ERROR_H_
