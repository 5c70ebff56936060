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

#include "supervoice/preprocess.h"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "supervoice/errors.h"
#include "supervoice/fft.h"
#include "test_util.h"

namespace supervoice {
namespace {

SilenceParams Params16k() { return SilenceParams::ForRate(16000); }

TEST(SilenceParams, FiftyMillisecondFrames) {
  EXPECT_EQ(SilenceParams::ForRate(16000).frame_len, 800u);
  EXPECT_EQ(SilenceParams::ForRate(192000).frame_len, 9600u);
  EXPECT_EQ(SilenceParams::ForRate(16000).tolerance_c, 25u);
}

TEST(RetainedFrames, AllZeroKeepsFirstC) {
  const std::vector<double> powers(100, 0.0);
  const std::vector<bool> keep = RetainedFrames(powers, 0.25, 25);
  for (size_t i = 0; i < 100; ++i) EXPECT_EQ(keep[i], i < 25) << i;
}

TEST(RetainedFrames, LoudThenSilentProfile) {
  std::vector<double> powers(150, 0.0);
  for (size_t i = 0; i < 50; ++i) powers[i] = 1.0;
  const std::vector<bool> keep = RetainedFrames(powers, 0.25, 25);
  for (size_t i = 0; i < 150; ++i) EXPECT_EQ(keep[i], i < 75) << i;
}

TEST(RetainedFrames, CounterResetsOnLoudFrame) {
  // Loud frame at 3 resets the run; c = 1 keeps one silent frame after it.
  const std::vector<double> powers = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0};
  const std::vector<bool> keep = RetainedFrames(powers, 0.5, 1);
  EXPECT_EQ(keep, (std::vector<bool>{true, true, false, true, true, false, false}));
}

TEST(RemoveSilence, AllZeroInputKeepsExactly25Frames) {
  const AudioBuffer in(std::vector<float>(100 * 800, 0.0f), 16000);
  const AudioBuffer out = RemoveSilence(in, Params16k());
  EXPECT_EQ(out.size(), 25u * 800u);
  EXPECT_EQ(out.sample_rate, 16000);
}

TEST(RemoveSilence, LoudThenSilentKeeps75Frames) {
  std::vector<float> s(150 * 800, 0.0f);
  for (size_t i = 0; i < 50 * 800; ++i) s[i] = (i % 2 == 0) ? 1.0f : -1.0f;
  const AudioBuffer out = RemoveSilence(AudioBuffer(s, 16000), Params16k());
  ASSERT_EQ(out.size(), 75u * 800u);
  for (size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out.samples[i], s[i]) << i;
}

TEST(RemoveSilence, ShortInputReturnedUnchanged) {
  const AudioBuffer in = testing::Noise(0.3, 16000, 799, 4);
  const AudioBuffer out = RemoveSilence(in, Params16k());
  EXPECT_EQ(out.samples, in.samples);
}

TEST(RemoveSilence, ConstantNonzeroSignalKeptWhole) {
  const AudioBuffer in(std::vector<float>(80 * 800, 0.25f), 16000);
  EXPECT_EQ(RemoveSilence(in, Params16k()).size(), in.size());
}

TEST(RemoveSilence, TrailingPartialFrameAppended) {
  std::vector<float> s(60 * 800 + 123, 0.0f);
  for (size_t i = 0; i < 10 * 800; ++i) s[i] = 0.5f;
  for (size_t i = 60 * 800; i < s.size(); ++i) s[i] = 0.125f;
  const AudioBuffer out = RemoveSilence(AudioBuffer(s, 16000), Params16k());
  ASSERT_EQ(out.size(), 35u * 800u + 123u);
  EXPECT_EQ(out.samples.back(), 0.125f);
}

TEST(RemoveSilence, OutputIsSubsequenceOfFrames) {
  const AudioBuffer in = testing::Noise(0.5, 16000, 40 * 800, 77);
  AudioBuffer loud_quiet = in;
  for (size_t i = 10 * 800; i < 40 * 800; ++i) loud_quiet.samples[i] *= 0.01f;
  const AudioBuffer out = RemoveSilence(loud_quiet, Params16k());
  EXPECT_EQ(out.size() % 800, 0u);
  EXPECT_LE(out.size(), in.size());
  EXPECT_EQ(out.size(), 35u * 800u);
}

TEST(RemoveSilence, EmptyInputThrows) {
  try {
    RemoveSilence(AudioBuffer({}, 16000), Params16k());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
}

TEST(DesignLowpass, UnitDcGainAndSymmetry) {
  const std::vector<double> h = DesignLowpass(255, 0.0375, 80.0);
  double sum = 0.0;
  for (double v : h) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  for (size_t i = 0; i < h.size(); ++i) EXPECT_DOUBLE_EQ(h[i], h[h.size() - 1 - i]);
  EXPECT_THROW(DesignLowpass(254, 0.1, 80.0), Error);
}

// Amplitude of the component at `bin` of a 2048-point unwindowed DFT.
double BinAmplitude(const std::vector<float>& x, size_t start, size_t bin) {
  std::vector<std::complex<double>> data(2048);
  for (size_t i = 0; i < 2048; ++i) data[i] = x[start + i];
  Fft(2048).Forward(data);
  return 2.0 * std::abs(data[bin]) / 2048.0;
}

TEST(Downsample, OneKilohertzToneSurvives) {
  const AudioBuffer in = testing::Tone(1000.0, 0.5, 192000, 192000);
  const AudioBuffer out = Downsample(in, ResampleSpec{});
  ASSERT_EQ(out.sample_rate, 16000);
  ASSERT_EQ(out.size(), 16000u);
  // 1 kHz is exactly bin 128 of a 2048-point frame at 16 kHz.
  std::vector<std::complex<double>> data(2048);
  for (size_t i = 0; i < 2048; ++i) data[i] = out.samples[4000 + i];
  Fft(2048).Forward(data);
  size_t argmax = 0;
  for (size_t k = 1; k <= 1024; ++k) {
    if (std::abs(data[k]) > std::abs(data[argmax])) argmax = k;
  }
  EXPECT_EQ(argmax, 128u);
  EXPECT_NEAR(BinAmplitude(out.samples, 4000, 128), 0.5, 0.005);
}

TEST(Downsample, ConstantStaysConstant) {
  const AudioBuffer in(std::vector<float>(19200, 0.7f), 192000);
  const AudioBuffer out = Downsample(in, ResampleSpec{});
  ASSERT_EQ(out.size(), 1600u);
  for (float v : out.samples) ASSERT_NEAR(v, 0.7, 1e-3);
}

TEST(Downsample, ThirtyKilohertzToneRejected) {
  const AudioBuffer in = testing::Tone(30000.0, 0.8, 192000, 96000);
  const AudioBuffer out = Downsample(in, ResampleSpec{});
  // Steady state only: the first and last half filter span depend on how
  // the ends are extended, not on the stopband.
  const size_t edge = (ResampleSpec{}.filter_taps / 2 + 11) / 12;
  double e_in = 0.0, e_out = 0.0;
  for (float v : in.samples) e_in += static_cast<double>(v) * v;
  for (size_t i = edge; i + edge < out.size(); ++i) {
    e_out += static_cast<double>(out.samples[i]) * out.samples[i];
  }
  e_in /= static_cast<double>(in.size());
  e_out /= static_cast<double>(out.size() - 2 * edge);
  EXPECT_LT(10.0 * std::log10(e_out / e_in), -60.0);
}

TEST(DesignLowpass, StopbandAtThirtyKilohertz) {
  const ResampleSpec spec;
  const double cutoff = 0.9 * (spec.target_rate / 2.0) / spec.source_rate;
  const std::vector<double> h =
      DesignLowpass(spec.filter_taps, cutoff, spec.stopband_attenuation_db);
  std::complex<double> response = 0.0;
  for (size_t n = 0; n < h.size(); ++n) {
    response += h[n] * std::polar(1.0, -2.0 * std::numbers::pi * 30000.0 / 192000.0 * n);
  }
  EXPECT_LT(20.0 * std::log10(std::abs(response)), -60.0);
}

TEST(Downsample, OutputLengthIsCeilNOverD) {
  for (size_t n : {1u, 11u, 12u, 13u, 1000u, 19201u}) {
    const AudioBuffer in = testing::Noise(0.5, 192000, n, n);
    EXPECT_EQ(Downsample(in, ResampleSpec{}).size(), (n + 11) / 12) << n;
  }
}

TEST(Downsample, DecimationOfOneIsLowpassOnly) {
  ResampleSpec spec;
  spec.source_rate = 16000;
  spec.target_rate = 16000;
  const AudioBuffer in = testing::Tone(200.0, 0.5, 16000, 4000);
  const AudioBuffer out = Downsample(in, spec);
  ASSERT_EQ(out.size(), in.size());
  for (size_t i = 200; i < 3800; ++i) ASSERT_NEAR(out.samples[i], in.samples[i], 1e-3) << i;
}

TEST(Downsample, NonIntegerRatioThrows) {
  ResampleSpec spec;
  spec.source_rate = 44100;
  try {
    Downsample(AudioBuffer({0.0f}, 44100), spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonIntegerDecimation);
  }
}

TEST(Downsample, RateMismatchThrows) {
  EXPECT_THROW(Downsample(AudioBuffer({0.0f}, 48000), ResampleSpec{}), Error);
}

}  // namespace
}  // namespace supervoice
