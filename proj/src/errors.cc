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

#include "supervoice/errors.h"

namespace supervoice {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonIntegerDecimation: return "NonIntegerDecimation";
    case ErrorCode::kInputTooShort: return "InputTooShort";
    case ErrorCode::kEmptyBand: return "EmptyBand";
    case ErrorCode::kEmptyFrameSet: return "EmptyFrameSet";
    case ErrorCode::kMismatchedBands: return "MismatchedBands";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kWindowLengthMismatch: return "WindowLengthMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kHashMismatch: return "HashMismatch";
    case ErrorCode::kLivenessRejected: return "LivenessRejected";
    case ErrorCode::kUnknownSpeaker: return "UnknownSpeaker";
    case ErrorCode::kSpoofDetected: return "SpoofDetected";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyClass: return "EmptyClass";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

}  // namespace supervoice
