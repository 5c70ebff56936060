// Copyright (c) 2026 The SuperVoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SUPERVOICE_ERRORS_H_
#define SUPERVOICE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace supervoice {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kUnsupportedFormat,
  kIoFailure,
  kEmptyInput,
  kNonIntegerDecimation,
  kInputTooShort,
  kEmptyBand,
  kEmptyFrameSet,
  kMismatchedBands,
  kEmptyList,
  kWindowLengthMismatch,
  kShapeMismatch,
  kNonFiniteLoss,
  kVersionMismatch,
  kCorruptFile,
  kHashMismatch,
  kLivenessRejected,
  kUnknownSpeaker,
  kSpoofDetected,
  kLengthMismatch,
  kEmptyClass,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported with this exception type; callers that
// need to branch on the failure kind inspect code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace supervoice

#endif  // SUPERVOICE_ERRORS_H_
