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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "supervoice/errors.h"
#include "test_util.h"

namespace supervoice {
namespace {

Spectrogram Toy(std::vector<std::vector<float>> rows_by_bin, double res = 1.0) {
  Spectrogram s;
  s.rows = rows_by_bin.size();
  s.cols = rows_by_bin.front().size();
  for (const auto& r : rows_by_bin) s.values.insert(s.values.end(), r.begin(), r.end());
  s.freq_resolution = res;
  s.sample_rate = static_cast<int>(2 * res * s.rows);
  return s;
}

TEST(StftConfig, CanonicalAndPreliminary) {
  const StftConfig c = StftConfig::Canonical();
  EXPECT_EQ(c.n_fft, 2048u);
  EXPECT_EQ(c.win_len, 2048u);
  EXPECT_EQ(c.hop, 512u);
  const StftConfig p = StftConfig::Preliminary(192000);
  EXPECT_EQ(p.win_len, 1920u);
  EXPECT_EQ(p.hop, 384u);
  EXPECT_EQ(p.n_fft, 2048u);
}

TEST(Stft, FrameCountForFourWindowsOfHop) {
  EXPECT_EQ(StftFrameCount(4096, StftConfig::Canonical()), 5u);
  EXPECT_EQ(StftFrameCount(2048, StftConfig::Canonical()), 1u);
  EXPECT_EQ(StftFrameCount(2047, StftConfig::Canonical()), 0u);
  const Spectrogram s = Stft(testing::Noise(0.5, 192000, 4096, 1), StftConfig::Canonical());
  EXPECT_EQ(s.cols, 5u);
  EXPECT_EQ(s.rows, 1024u);
}

TEST(Stft, ResolutionAt192kHz) {
  const Spectrogram s = Stft(testing::Noise(0.5, 192000, 2048, 2), StftConfig::Canonical());
  EXPECT_DOUBLE_EQ(s.freq_resolution, 93.75);
  EXPECT_DOUBLE_EQ(s.BinFrequency(10), 937.5);
}

TEST(Stft, AllZeroHitsFloor) {
  const Spectrogram s =
      Stft(AudioBuffer(std::vector<float>(8192, 0.0f), 192000), StftConfig::Canonical());
  for (float v : s.values) ASSERT_EQ(v, kDefaultDbFloor);
}

TEST(Stft, ValuesBoundedByFloorAndZero) {
  const Spectrogram s =
      Stft(testing::Noise(0.9, 192000, 20000, 3), StftConfig::Canonical(), -80.0f);
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  EXPECT_GE(*lo, -80.0f);
  EXPECT_EQ(*hi, 0.0f);
}

TEST(Stft, BinCenteredSinePeaksAtItsRow) {
  for (size_t k : {5u, 100u, 256u, 700u, 1000u}) {
    const double f = static_cast<double>(k) * 93.75;
    const Spectrogram s =
        Stft(testing::Tone(f, 0.5, 192000, 6144, 0.3), StftConfig::Canonical());
    for (size_t t = 0; t < s.cols; ++t) {
      size_t argmax = 0;
      for (size_t r = 1; r < s.rows; ++r) {
        if (s.at(r, t) > s.at(argmax, t)) argmax = r;
      }
      EXPECT_EQ(argmax, k) << "frame " << t;
    }
  }
}

TEST(StftMagnitudes, MatchesDirectDftOracle) {
  const AudioBuffer b = testing::Noise(1.0, 192000, 2048 + 3 * 512, 17);
  const StftConfig c = StftConfig::Canonical();
  const std::vector<double> mags = StftMagnitudes(b, c);
  const std::vector<double> w = HannWindow(2048);
  ASSERT_EQ(mags.size(), 4u * 1025u);
  for (size_t t = 0; t < 4; ++t) {
    std::vector<double> frame(2048);
    for (size_t i = 0; i < 2048; ++i) frame[i] = w[i] * b.samples[t * 512 + i];
    const auto ref = testing::DirectDft(frame);
    for (size_t k = 0; k <= 1024; ++k) {
      const double expect = static_cast<double>(std::abs(ref[k]));
      ASSERT_GT(expect, 0.0);
      EXPECT_LE(std::abs(mags[t * 1025 + k] - expect) / expect, 1e-6) << t << "," << k;
    }
  }
}

TEST(StftMagnitudes, ParsevalPerFrame) {
  const AudioBuffer b = testing::Noise(1.0, 48000, 2048 + 4 * 512, 21);
  const StftConfig c = StftConfig::Canonical();
  const std::vector<double> mags = StftMagnitudes(b, c);
  const std::vector<double> w = HannWindow(2048);
  for (size_t t = 0; t < 5; ++t) {
    const double* m = &mags[t * 1025];
    double lhs = m[0] * m[0] + m[1024] * m[1024];
    for (size_t k = 1; k < 1024; ++k) lhs += 2.0 * m[k] * m[k];
    double rhs = 0.0;
    for (size_t i = 0; i < 2048; ++i) {
      const double v = w[i] * b.samples[t * 512 + i];
      rhs += v * v;
    }
    EXPECT_NEAR(lhs / (2048.0 * rhs), 1.0, 1e-10);
  }
}

TEST(StftMagnitudes, OddFrameCountUsesUnpairedTail) {
  const AudioBuffer b = testing::Noise(1.0, 192000, 2048 + 2 * 512, 5);
  const std::vector<double> mags = StftMagnitudes(b, StftConfig::Canonical());
  const std::vector<double> w = HannWindow(2048);
  std::vector<double> frame(2048);
  for (size_t i = 0; i < 2048; ++i) frame[i] = w[i] * b.samples[1024 + i];
  const auto ref = testing::DirectDft(frame);
  for (size_t k = 0; k <= 1024; k += 37) {
    EXPECT_NEAR(mags[2 * 1025 + k], static_cast<double>(std::abs(ref[k])), 1e-9);
  }
}

TEST(StftMagnitudes, ShortInputThrows) {
  try {
    StftMagnitudes(AudioBuffer(std::vector<float>(100), 192000), StftConfig::Canonical());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInputTooShort);
  }
}

TEST(HannWindow, PeriodicShape) {
  const std::vector<double> w = HannWindow(8);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_DOUBLE_EQ(w[4], 1.0);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
}

TEST(ToDb, ReferenceDecadeAndClamp) {
  const std::vector<double> m = {2.0, 0.2, 0.0, 2e-9};
  const std::vector<float> db = ToDb(m, -100.0f);
  EXPECT_FLOAT_EQ(db[0], 0.0f);
  EXPECT_FLOAT_EQ(db[1], -20.0f);
  EXPECT_EQ(db[2], -100.0f);
  EXPECT_EQ(db[3], -100.0f);
  const std::vector<double> zeros(4, 0.0);
  for (float v : ToDb(zeros, -60.0f)) EXPECT_EQ(v, -60.0f);
}

TEST(CropBand, EightToFortyEightKilohertz) {
  const Spectrogram s = Stft(testing::Noise(0.5, 192000, 4096, 8), StftConfig::Canonical());
  const Spectrogram c = CropBand(s, 8000.0, 48000.0);
  EXPECT_EQ(c.bin_offset, 86u);
  EXPECT_EQ(c.rows, 426u);
  EXPECT_EQ(c.cols, s.cols);
  EXPECT_EQ(c.at(0, 2), s.at(86, 2));
  EXPECT_EQ(c.at(425, 4), s.at(511, 4));
  EXPECT_GE(c.BinFrequency(0), 8000.0);
  EXPECT_LT(c.BinFrequency(c.rows - 1), 48000.0);
}

TEST(CropBand, FullRangeIsIdentity) {
  const Spectrogram s = Stft(testing::Noise(0.5, 192000, 4096, 9), StftConfig::Canonical());
  const Spectrogram c = CropBand(s, 0.0, 96000.0);
  EXPECT_EQ(c.rows, s.rows);
  EXPECT_EQ(c.bin_offset, 0u);
  EXPECT_EQ(c.values, s.values);
}

TEST(CropBand, NestedCropKeepsAbsoluteBins) {
  const Spectrogram s = Stft(testing::Noise(0.5, 192000, 4096, 10), StftConfig::Canonical());
  const Spectrogram outer = CropBand(s, 8000.0, 48000.0);
  const Spectrogram inner = CropBand(outer, 16000.0, 24000.0);
  const Spectrogram direct = CropBand(s, 16000.0, 24000.0);
  EXPECT_EQ(inner.bin_offset, direct.bin_offset);
  EXPECT_EQ(inner.values, direct.values);
}

TEST(CropBand, DegenerateBandsThrow) {
  const Spectrogram s = Stft(testing::Noise(0.5, 192000, 4096, 11), StftConfig::Canonical());
  for (auto [lo, hi] : {std::pair{8000.0, 8000.0}, std::pair{9000.0, 8000.0},
                        std::pair{8000.0, 8001.0}}) {
    try {
      CropBand(s, lo, hi);
      ADD_FAILURE() << lo << ".." << hi;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kEmptyBand);
    }
  }
}

TEST(TopMFrames, SaturatesAtFrameCount) {
  const Spectrogram s = Toy({{1, 2, 3}, {4, 5, 6}});
  const FrameSet f = TopMFrames(s, 10, 0.0);
  EXPECT_EQ(f.indices, (std::vector<size_t>{0, 1, 2}));
  EXPECT_EQ(f.source_frames_total, 3u);
}

TEST(TopMFrames, PicksLoudestUltrasonicColumn) {
  // Row 0 sits below the threshold and would reverse the order if counted.
  const Spectrogram s = Toy({{0.0f, -100.0f}, {-20.0f, -5.0f}, {-20.0f, -5.0f}});
  EXPECT_EQ(TopMFrames(s, 1, 1.0).indices, (std::vector<size_t>{1}));
}

TEST(TopMFrames, TieGoesToLowerIndex) {
  const Spectrogram s = Toy({{-3.0f, -3.0f, -3.0f}});
  EXPECT_EQ(TopMFrames(s, 1, 0.0).indices, (std::vector<size_t>{0}));
  EXPECT_EQ(TopMFrames(s, 2, 0.0).indices, (std::vector<size_t>{0, 1}));
}

TEST(TopMFrames, ResultSortedAscending) {
  const Spectrogram s = Toy({{-1.0f, -9.0f, -2.0f, -8.0f, 0.0f}});
  EXPECT_EQ(TopMFrames(s, 3, 0.0).indices, (std::vector<size_t>{0, 2, 4}));
}

TEST(SpectrogramFile, RoundTrip) {
  testing::TempDir dir("spec");
  const Spectrogram s =
      CropBand(Stft(testing::Noise(0.5, 192000, 4096, 12), StftConfig::Canonical()), 8000, 48000);
  WriteSpectrogram(s, 2048, dir / "s.bin");
  const Spectrogram r = ReadSpectrogram(dir / "s.bin");
  EXPECT_EQ(r.rows, s.rows);
  EXPECT_EQ(r.cols, s.cols);
  EXPECT_EQ(r.bin_offset, s.bin_offset);
  EXPECT_EQ(r.values, s.values);
  EXPECT_DOUBLE_EQ(r.freq_resolution, s.freq_resolution);
}

}  // namespace
}  // namespace supervoice
