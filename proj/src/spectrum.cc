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

#include "supervoice/spectrum.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <string>

#include "supervoice/errors.h"
#include "supervoice/fft.h"

namespace supervoice {
namespace {

constexpr char kSpectrogramMagic[8] = {'S', 'V', 'S', 'P', 'E', 'C', '0', '1'};

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t GetU32(const std::vector<uint8_t>& b, size_t pos) {
  return static_cast<uint32_t>(b[pos]) | (static_cast<uint32_t>(b[pos + 1]) << 8) |
         (static_cast<uint32_t>(b[pos + 2]) << 16) |
         (static_cast<uint32_t>(b[pos + 3]) << 24);
}

}  // namespace

StftConfig StftConfig::Preliminary(int sample_rate) {
  StftConfig c;
  c.n_fft = 2048;
  c.win_len = static_cast<size_t>(sample_rate) / 100;
  c.hop = static_cast<size_t>(sample_rate) / 500;
  return c;
}

void StftConfig::Validate() const {
  if (!IsPowerOfTwo(n_fft)) throw Error(ErrorCode::kInvalidArgument, "n_fft must be a power of two");
  if (hop == 0 || hop > win_len || win_len > n_fft) {
    throw Error(ErrorCode::kInvalidArgument, "require 0 < hop <= win_len <= n_fft");
  }
}

std::vector<double> HannWindow(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n);
  }
  return w;
}

size_t StftFrameCount(size_t num_samples, const StftConfig& config) {
  if (num_samples < config.win_len) return 0;
  return (num_samples - config.win_len) / config.hop + 1;
}

std::vector<double> StftMagnitudes(const AudioBuffer& buffer, const StftConfig& config) {
  config.Validate();
  if (buffer.size() < config.win_len) {
    throw Error(ErrorCode::kInputTooShort,
                std::to_string(buffer.size()) + " samples < window " +
                    std::to_string(config.win_len));
  }
  const size_t n = config.n_fft;
  const size_t bins = n / 2 + 1;
  const size_t frames = StftFrameCount(buffer.size(), config);
  const std::vector<double> window = HannWindow(config.win_len);
  const Fft fft(n);
  std::vector<double> mags(frames * bins);
  std::vector<std::complex<double>> z(n);

  // Two real frames per complex transform: frame a in the real part,
  // frame b in the imaginary part, separated by conjugate symmetry.
  for (size_t a = 0; a < frames; a += 2) {
    const bool pair = a + 1 < frames;
    std::fill(z.begin(), z.end(), std::complex<double>(0.0, 0.0));
    for (size_t i = 0; i < config.win_len; ++i) {
      const double xa = window[i] * buffer.samples[a * config.hop + i];
      const double xb = pair ? window[i] * buffer.samples[(a + 1) * config.hop + i] : 0.0;
      z[i] = {xa, xb};
    }
    fft.Forward(z);
    for (size_t k = 0; k < bins; ++k) {
      const std::complex<double> zk = z[k];
      const std::complex<double> zc = std::conj(z[(n - k) % n]);
      const std::complex<double> xa = 0.5 * (zk + zc);
      const std::complex<double> diff = zk - zc;
      const std::complex<double> xb(0.5 * diff.imag(), -0.5 * diff.real());
      mags[a * bins + k] = std::abs(xa);
      if (pair) mags[(a + 1) * bins + k] = std::abs(xb);
    }
  }
  return mags;
}

std::vector<float> ToDb(std::span<const double> magnitudes, float floor_db) {
  std::vector<float> out(magnitudes.size(), floor_db);
  double ref = 0.0;
  for (double m : magnitudes) {
    if (m < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative magnitude");
    ref = std::max(ref, m);
  }
  if (ref == 0.0) return out;
  for (size_t i = 0; i < magnitudes.size(); ++i) {
    if (magnitudes[i] <= 0.0) continue;
    const double db = 20.0 * std::log10(magnitudes[i] / ref);
    out[i] = static_cast<float>(std::max<double>(db, floor_db));
  }
  return out;
}

Spectrogram Stft(const AudioBuffer& buffer, const StftConfig& config, float db_floor) {
  const std::vector<double> mags = StftMagnitudes(buffer, config);
  const size_t bins = config.n_fft / 2 + 1;
  const size_t frames = mags.size() / bins;
  const size_t rows = config.n_fft / 2;

  // Transpose to bin-major and drop the Nyquist bin before the dB reference
  // is taken, so the reference is the maximum of what is stored.
  std::vector<double> kept(rows * frames);
  for (size_t t = 0; t < frames; ++t) {
    for (size_t r = 0; r < rows; ++r) kept[r * frames + t] = mags[t * bins + r];
  }
  Spectrogram spec;
  spec.values = ToDb(kept, db_floor);
  spec.rows = rows;
  spec.cols = frames;
  spec.sample_rate = buffer.sample_rate;
  spec.freq_resolution = static_cast<double>(buffer.sample_rate) / config.n_fft;
  spec.hop = config.hop;
  spec.db_floor = db_floor;
  return spec;
}

Spectrogram CropBand(const Spectrogram& spec, double f_low, double f_high) {
  if (!(f_low >= 0.0 && f_low < f_high)) {
    throw Error(ErrorCode::kEmptyBand, "require 0 <= f_low < f_high");
  }
  // Absolute bins b with f_low <= b * res < f_high.
  const size_t first_abs = static_cast<size_t>(std::ceil(f_low / spec.freq_resolution));
  size_t end_abs = static_cast<size_t>(std::ceil(f_high / spec.freq_resolution));
  const size_t lo = std::max(first_abs, spec.bin_offset);
  const size_t hi = std::min(end_abs, spec.bin_offset + spec.rows);
  if (lo >= hi) throw Error(ErrorCode::kEmptyBand, "band holds no bins of this spectrogram");

  Spectrogram out = spec;
  out.rows = hi - lo;
  out.bin_offset = lo;
  out.values.assign(spec.values.begin() + (lo - spec.bin_offset) * spec.cols,
                    spec.values.begin() + (hi - spec.bin_offset) * spec.cols);
  return out;
}

FrameSet TopMFrames(const Spectrogram& spec, size_t m, double f_threshold) {
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");
  FrameSet out;
  out.source_frames_total = spec.cols;
  std::vector<double> energy(spec.cols, 0.0);
  for (size_t r = 0; r < spec.rows; ++r) {
    if (spec.BinFrequency(r) < f_threshold) continue;
    const float* row = &spec.values[r * spec.cols];
    for (size_t t = 0; t < spec.cols; ++t) energy[t] += row[t];
  }
  std::vector<size_t> order(spec.cols);
  std::iota(order.begin(), order.end(), size_t{0});
  const size_t take = std::min(m, spec.cols);
  std::partial_sort(order.begin(), order.begin() + take, order.end(),
                    [&](size_t a, size_t b) {
                      if (energy[a] != energy[b]) return energy[a] > energy[b];
                      return a < b;
                    });
  out.indices.assign(order.begin(), order.begin() + take);
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

void WriteSpectrogram(const Spectrogram& spec, size_t n_fft,
                      const std::filesystem::path& path) {
  std::string out(kSpectrogramMagic, sizeof(kSpectrogramMagic));
  PutU32(&out, static_cast<uint32_t>(spec.rows));
  PutU32(&out, static_cast<uint32_t>(spec.cols));
  PutU32(&out, static_cast<uint32_t>(spec.sample_rate));
  PutU32(&out, static_cast<uint32_t>(spec.hop));
  PutU32(&out, static_cast<uint32_t>(n_fft));
  PutU32(&out, static_cast<uint32_t>(spec.bin_offset));
  PutU32(&out, std::bit_cast<uint32_t>(spec.db_floor));
  for (float v : spec.values) PutU32(&out, std::bit_cast<uint32_t>(v));
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

Spectrogram ReadSpectrogram(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  const std::vector<uint8_t> b((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
  constexpr size_t kHeader = sizeof(kSpectrogramMagic) + 7 * 4;
  if (b.size() < kHeader || std::memcmp(b.data(), kSpectrogramMagic, 8) != 0) {
    throw Error(ErrorCode::kCorruptFile, path.string() + ": not a spectrogram export");
  }
  Spectrogram spec;
  spec.rows = GetU32(b, 8);
  spec.cols = GetU32(b, 12);
  spec.sample_rate = static_cast<int>(GetU32(b, 16));
  spec.hop = GetU32(b, 20);
  const uint32_t n_fft = GetU32(b, 24);
  spec.bin_offset = GetU32(b, 28);
  spec.db_floor = std::bit_cast<float>(GetU32(b, 32));
  if (n_fft == 0 || b.size() != kHeader + spec.rows * spec.cols * 4) {
    throw Error(ErrorCode::kCorruptFile, path.string() + ": size does not match header");
  }
  spec.freq_resolution = static_cast<double>(spec.sample_rate) / n_fft;
  spec.values.resize(spec.rows * spec.cols);
  for (size_t i = 0; i < spec.values.size(); ++i) {
    spec.values[i] = std::bit_cast<float>(GetU32(b, kHeader + 4 * i));
  }
  return spec;
}

}  // namespace supervoice
