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

#include "supervoice/liveness.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "supervoice/errors.h"
#include "supervoice/synthcorpus.h"
#include "test_util.h"

namespace supervoice {
namespace {

// Bin b sits at b Hz, so band edges can be written as bin numbers.
LivenessConfig UnitBins(double low1, double high1, double low2, double high2) {
  LivenessConfig c;
  c.low1 = low1;
  c.high1 = high1;
  c.low2 = low2;
  c.high2 = high2;
  return c;
}

TEST(NormalizedCumulativeEnergy, HandComputed) {
  Spectrogram s;
  s.rows = 2;
  s.cols = 2;
  s.values = {-10, -20, -30, -40};
  FrameSet f;
  f.indices = {0, 1};
  EXPECT_EQ(NormalizedCumulativeEnergy(s, f), (std::vector<double>{20.0, -20.0}));
}

TEST(NormalizedCumulativeEnergy, ConstantGivesZero) {
  Spectrogram s;
  s.rows = 4;
  s.cols = 3;
  s.values.assign(12, -33.0f);
  FrameSet f;
  f.indices = {0, 2};
  for (double v : NormalizedCumulativeEnergy(s, f)) EXPECT_EQ(v, 0.0);
}

TEST(NormalizedCumulativeEnergy, SingleFrameSubtractsGlobalMean) {
  Spectrogram s;
  s.rows = 2;
  s.cols = 3;
  s.values = {-1, -2, -3, -4, -5, -9};
  FrameSet f;
  f.indices = {1};
  const double g = (-1 - 2 - 3 - 4 - 5 - 9) / 6.0;
  const std::vector<double> sp = NormalizedCumulativeEnergy(s, f);
  EXPECT_DOUBLE_EQ(sp[0], -2.0 - g);
  EXPECT_DOUBLE_EQ(sp[1], -5.0 - g);
}

TEST(NormalizedCumulativeEnergy, EmptyFramesThrow) {
  Spectrogram s;
  s.rows = 1;
  s.cols = 1;
  s.values = {0};
  try {
    NormalizedCumulativeEnergy(s, FrameSet{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyFrameSet);
  }
}

TEST(Ratios, ToyR1) {
  const std::vector<double> sp = {1, 1, 2, 2};
  EXPECT_DOUBLE_EQ(R1(sp, 1.0, UnitBins(2, 4, 1, 4)), 4.0 / 6.0);
}

TEST(Ratios, ToyR2) {
  const std::vector<double> sp = {2, 2, 1, 1};
  EXPECT_DOUBLE_EQ(R2(sp, 1.0, UnitBins(2, 4, 1, 4)), 2.0 / 6.0);
}

TEST(Ratios, ZeroProfileGivesSentinel) {
  const std::vector<double> sp(4, 0.0);
  const LivenessConfig c = UnitBins(2, 4, 1, 4);
  EXPECT_EQ(R1(sp, 1.0, c), kRatioSentinel);
  EXPECT_EQ(R2(sp, 1.0, c), kRatioSentinel);
  EXPECT_EQ(LivenessDecision(R1(sp, 1.0, c), R2(sp, 1.0, c)), Verdict::kSpoof);
  EXPECT_EQ(LivenessDecision(0.5, kRatioSentinel), Verdict::kSpoof);
}

TEST(Ratios, BandBeyondProfileThrows) {
  const std::vector<double> sp = {1, 2, 3};
  EXPECT_THROW(R1(sp, 1.0, UnitBins(2, 4, 1, 2)), Error);
}

TEST(LivenessDecision, StrictPositiveRule) {
  EXPECT_EQ(LivenessDecision(0.3, 0.2), Verdict::kLive);
  EXPECT_EQ(LivenessDecision(-0.1, 0.5), Verdict::kSpoof);
  EXPECT_EQ(LivenessDecision(0.4, 0.0), Verdict::kSpoof);
  EXPECT_EQ(LivenessDecision(0.0, 0.4), Verdict::kSpoof);
  EXPECT_EQ(LivenessDecision(std::nan(""), 1.0), Verdict::kSpoof);
  EXPECT_STREQ(VerdictName(Verdict::kLive), "Live");
  EXPECT_STREQ(VerdictName(Verdict::kSpoof), "Spoof");
}

TEST(LivenessReport, ExactlyFourFeatures) {
  static_assert(LivenessReport::kFeatureCount == 4);
  const SpeakerProfile p = SpeakerProfile::FromSeed(3);
  const LivenessReport r = AssessLiveness(GenerateGenuine(p, 1.0, 192000, 9));
  const auto f = r.Features();
  EXPECT_EQ(f.size(), 4u);
  EXPECT_DOUBLE_EQ(r.r1, f[0] / f[1]);
  EXPECT_DOUBLE_EQ(r.r2, f[2] / f[3]);
}

TEST(AssessLiveness, InvariantToGain) {
  const SpeakerProfile p = SpeakerProfile::FromSeed(5);
  const AudioBuffer a = GenerateGenuine(p, 1.0, 192000, 1);
  AudioBuffer b = a;
  for (float& v : b.samples) v *= 0.125f;  // exact in binary floating point
  const LivenessReport ra = AssessLiveness(a);
  const LivenessReport rb = AssessLiveness(b);
  EXPECT_NEAR(ra.r1, rb.r1, 1e-6);
  EXPECT_NEAR(ra.r2, rb.r2, 1e-6);
  EXPECT_EQ(ra.verdict, rb.verdict);
}

TEST(AssessLiveness, GenuineLiveAndReplaysSpoof) {
  for (uint64_t seed : {1u, 2u, 3u}) {
    const SpeakerProfile p = SpeakerProfile::FromSeed(seed);
    const AudioBuffer g = GenerateGenuine(p, 2.0, 192000, seed * 17);
    const LivenessReport live = AssessLiveness(g);
    EXPECT_GT(live.r1, 0.0);
    EXPECT_GT(live.r2, 0.0);
    EXPECT_EQ(live.verdict, Verdict::kLive);
    const LivenessReport lp =
        AssessLiveness(ApplyDevice(g, {DeviceKind::kCommercialReplay, 20000.0}));
    EXPECT_EQ(lp.verdict, Verdict::kSpoof);
    const LivenessReport hp =
        AssessLiveness(ApplyDevice(g, {DeviceKind::kUltrasonicReplay, 1500.0}));
    EXPECT_LT(hp.r2, 0.0);
    EXPECT_EQ(hp.verdict, Verdict::kSpoof);
  }
}

TEST(AssessLiveness, SilenceIsSpoof) {
  const AudioBuffer z(std::vector<float>(192000, 0.0f), 192000);
  EXPECT_EQ(AssessLiveness(z).verdict, Verdict::kSpoof);
}

TEST(AssessLiveness, RejectsCroppedSpectrogram) {
  const Spectrogram s = Stft(testing::Noise(0.5, 192000, 4096, 1), StftConfig::Canonical());
  EXPECT_THROW(AssessLiveness(CropBand(s, 8000, 48000)), Error);
}

TEST(LivenessConfig, Validation) {
  LivenessConfig c;
  c.m = 0;
  EXPECT_THROW(c.Validate(), Error);
  EXPECT_THROW(UnitBins(4, 2, 1, 2).Validate(), Error);
  EXPECT_NO_THROW(LivenessConfig{}.Validate());
}

}  // namespace
}  // namespace supervoice
