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

#ifndef SUPERVOICE_PREPROCESS_H_
#define SUPERVOICE_PREPROCESS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "supervoice/audio_io.h"

namespace supervoice {

struct SilenceParams {
  size_t frame_len = 800;     // samples per segment
  double theta_ratio = 0.25;  // fraction of the power range treated as noise
  size_t tolerance_c = 25;    // contiguous silent frames still kept

  // 50 ms segments at `sample_rate` (800 at 16 kHz, 9600 at 192 kHz).
  static SilenceParams ForRate(int sample_rate);
  void Validate() const;
};

// Silence counter rule over per-frame mean-square powers: the counter resets
// to zero on a frame whose power exceeds theta, otherwise increments, and a
// frame is kept while the counter is <= c. Returns one flag per frame.
std::vector<bool> RetainedFrames(std::span<const double> frame_powers,
                                 double theta_ratio, size_t tolerance_c);

// Concatenates the retained full frames in order and appends the trailing
// partial frame untouched. A signal whose frames all share one nonzero power
// is returned whole. Throws Error(kEmptyInput).
AudioBuffer RemoveSilence(const AudioBuffer& buffer, const SilenceParams& params);

struct ResampleSpec {
  int source_rate = 192000;
  int target_rate = 16000;
  size_t filter_taps = 255;
  double stopband_attenuation_db = 80.0;
};

// Kaiser-windowed sinc low-pass with unit DC gain. `cutoff` is in cycles per
// sample (0.5 = Nyquist); `taps` must be odd.
std::vector<double> DesignLowpass(size_t taps, double cutoff,
                                  double stopband_attenuation_db);

// Anti-alias filter (cutoff 0.45 * target_rate) followed by keeping every
// D-th sample, D = source_rate / target_rate. The filter is zero-phase and
// the input is extended by odd reflection about its end samples, so
// constants and tones continue without a kink at the edges;
// output length is ceil(n / D).
// Throws Error(kNonIntegerDecimation).
AudioBuffer Downsample(const AudioBuffer& buffer, const ResampleSpec& spec);

}  // namespace supervoice

#endif  // SUPERVOICE_PREPROCESS_H_
