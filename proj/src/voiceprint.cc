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

#include "supervoice/voiceprint.h"

#include "supervoice/errors.h"

namespace supervoice {

LtaVector Lta(const Spectrogram& spec, const FrameSet& frames) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyFrameSet, "LTA needs at least one frame");
  for (size_t t : frames.indices) {
    if (t >= spec.cols) throw Error(ErrorCode::kInvalidArgument, "frame index outside spectrogram");
  }
  LtaVector lta;
  lta.values.assign(spec.rows, 0.0);
  lta.f_low = spec.BinFrequency(0);
  lta.f_high = spec.BinFrequency(spec.rows);
  lta.frames_used = frames.size();
  const double inv_m = 1.0 / static_cast<double>(frames.size());
  for (size_t r = 0; r < spec.rows; ++r) {
    double acc = 0.0;
    for (size_t t : frames.indices) acc += spec.at(r, t);
    lta.values[r] = acc * inv_m;
  }
  return lta;
}

VoiceprintP Voiceprint(std::span<const LtaVector> ltas) {
  if (ltas.empty()) throw Error(ErrorCode::kEmptyList, "voiceprint needs at least one LTA");
  const LtaVector& first = ltas.front();
  for (const LtaVector& l : ltas) {
    if (l.values.size() != first.values.size() || l.f_low != first.f_low ||
        l.f_high != first.f_high) {
      throw Error(ErrorCode::kMismatchedBands, "LTA vectors cover different bands");
    }
  }
  VoiceprintP p;
  p.values.assign(first.values.size(), 0.0);
  p.sentence_count = ltas.size();
  for (const LtaVector& l : ltas) {
    for (size_t i = 0; i < l.values.size(); ++i) p.values[i] += l.values[i];
  }
  for (double& v : p.values) v /= static_cast<double>(ltas.size());
  return p;
}

LtaVector UtteranceLta(const AudioBuffer& buffer, double f_low, double f_high,
                       size_t m, double f_threshold) {
  const Spectrogram full = Stft(buffer, StftConfig::Canonical());
  const FrameSet frames = TopMFrames(full, m, f_threshold);
  return Lta(CropBand(full, f_low, f_high), frames);
}

}  // namespace supervoice
