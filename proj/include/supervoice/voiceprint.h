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

#ifndef SUPERVOICE_VOICEPRINT_H_
#define SUPERVOICE_VOICEPRINT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "supervoice/spectrum.h"

namespace supervoice {

// Long-term average of dB energies over the selected frames, one value per
// row of the (usually band-cropped) spectrogram it was computed from.
struct LtaVector {
  std::vector<double> values;
  double f_low = 0.0;
  double f_high = 0.0;
  size_t frames_used = 0;
};

// Per-bin mean of a speaker's sentence LTAs.
struct VoiceprintP {
  std::vector<double> values;
  size_t sentence_count = 0;
};

// Throws Error(kEmptyFrameSet) or Error(kInvalidArgument) for indices
// outside the spectrogram.
LtaVector Lta(const Spectrogram& spec, const FrameSet& frames);

// Throws Error(kEmptyList) or Error(kMismatchedBands).
VoiceprintP Voiceprint(std::span<const LtaVector> ltas);

// Convenience: dB STFT of `buffer`, top-M ultrasonic frames, LTA over the
// [f_low, f_high) crop.
LtaVector UtteranceLta(const AudioBuffer& buffer, double f_low = 16000.0,
                       double f_high = 48000.0, size_t m = 100,
                       double f_threshold = 20000.0);

}  // namespace supervoice

#endif  // SUPERVOICE_VOICEPRINT_H_
