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

#ifndef SUPERVOICE_AUDIO_IO_H_
#define SUPERVOICE_AUDIO_IO_H_

#include <cstddef>
#include <filesystem>
#include <vector>

namespace supervoice {

// Mono audio held as normalized amplitudes in [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate = 0;

  AudioBuffer() = default;
  AudioBuffer(std::vector<float> s, int rate)
      : samples(std::move(s)), sample_rate(rate) {}

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

// Rates the processing pipeline accepts; I/O itself takes any positive rate.
bool IsPipelineRate(int sample_rate);

enum class SampleFormat { kPcm16, kFloat32 };

// Reads a mono RIFF/WAVE file with PCM-16 (tag 1) or IEEE float-32 (tag 3)
// samples. PCM-16 is divided by 32768 so -32768 maps to exactly -1.0.
// Throws Error(kNotFound) or Error(kUnsupportedFormat).
AudioBuffer ReadWav(const std::filesystem::path& path);

// Float-32 output round-trips bit-exactly; PCM-16 output rounds to the
// nearest quantum and saturates at [-32768, 32767]. Throws Error(kIoFailure).
void WriteWav(const AudioBuffer& buffer, const std::filesystem::path& path,
              SampleFormat format = SampleFormat::kFloat32);

}  // namespace supervoice

#endif  // SUPERVOICE_AUDIO_IO_H_
