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

#ifndef SUPERVOICE_SPECTRUM_H_
#define SUPERVOICE_SPECTRUM_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "supervoice/audio_io.h"

namespace supervoice {

enum class WindowKind { kHann };

struct StftConfig {
  size_t n_fft = 2048;
  size_t win_len = 2048;
  size_t hop = 512;
  WindowKind window = WindowKind::kHann;

  // 2048-point frames, hop of a quarter window. The pipeline default.
  static StftConfig Canonical() { return {}; }
  // 10 ms Hann window, 2 ms hop, 2048-point FFT at `sample_rate`.
  static StftConfig Preliminary(int sample_rate);
  void Validate() const;
};

constexpr float kDefaultDbFloor = -100.0f;

// dB magnitudes, rows = frequency bins, cols = frames, row-major.
// Row r holds absolute FFT bin (bin_offset + r).
struct Spectrogram {
  std::vector<float> values;
  size_t rows = 0;
  size_t cols = 0;
  int sample_rate = 0;
  double freq_resolution = 0.0;  // Hz per bin
  size_t hop = 0;
  float db_floor = kDefaultDbFloor;
  size_t bin_offset = 0;

  float at(size_t row, size_t col) const { return values[row * cols + col]; }
  float& at(size_t row, size_t col) { return values[row * cols + col]; }
  double BinFrequency(size_t row) const {
    return static_cast<double>(bin_offset + row) * freq_resolution;
  }
};

// Frame columns chosen from a spectrogram, strictly increasing.
struct FrameSet {
  std::vector<size_t> indices;
  size_t source_frames_total = 0;

  size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

// Periodic Hann taper of length n.
std::vector<double> HannWindow(size_t n);

size_t StftFrameCount(size_t num_samples, const StftConfig& config);

// Linear |DFT| of each windowed frame, n_fft/2 + 1 one-sided bins per frame
// (frame-major). With this unnormalized transform, for every frame
//   |X0|^2 + 2 * sum_{k=1}^{N/2-1} |Xk|^2 + |X_{N/2}|^2 = N * sum_n (w[n] x[n])^2.
// Throws Error(kInputTooShort).
std::vector<double> StftMagnitudes(const AudioBuffer& buffer, const StftConfig& config);

// 20 log10(m / ref) clamped below at floor_db, ref = max over `magnitudes`.
// An all-zero input maps every cell to floor_db.
std::vector<float> ToDb(std::span<const double> magnitudes, float floor_db);

// dB spectrogram with n_fft/2 rows (the Nyquist bin is dropped).
Spectrogram Stft(const AudioBuffer& buffer, const StftConfig& config,
                 float db_floor = kDefaultDbFloor);

// Keeps bins b with f_low <= b * resolution < f_high. Throws Error(kEmptyBand).
Spectrogram CropBand(const Spectrogram& spec, double f_low, double f_high);

// The m frames with the largest sum of dB values over bins at or above
// f_threshold; ties go to the lower frame index. Result is sorted.
FrameSet TopMFrames(const Spectrogram& spec, size_t m, double f_threshold);

// Binary export: "SVSPEC01", then u32 rows, cols, sample_rate, hop, n_fft,
// bin_offset, f32 db_floor, then `rows` rows of `cols` little-endian float-32.
void WriteSpectrogram(const Spectrogram& spec, size_t n_fft,
                      const std::filesystem::path& path);
Spectrogram ReadSpectrogram(const std::filesystem::path& path);

}  // namespace supervoice

#endif  // SUPERVOICE_SPECTRUM_H_
