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

#include "supervoice/metrics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "supervoice/errors.h"
#include "supervoice/rng.h"

namespace supervoice {
namespace {

TrialSet Trials(std::vector<double> genuine, std::vector<double> impostor) {
  TrialSet t;
  for (double s : genuine) t.Add(s, true);
  for (double s : impostor) t.Add(s, false);
  return t;
}

TEST(FarFrr, SeparableAtMidThreshold) {
  const ErrorRates r = FarFrr(Trials({0.9, 0.8}, {0.1, 0.2}), 0.5);
  EXPECT_EQ(r.far, 0.0);
  EXPECT_EQ(r.frr, 0.0);
}

TEST(FarFrr, RejectAllAndAcceptAll) {
  const TrialSet t = Trials({0.9, 0.8}, {0.1, 0.2});
  const ErrorRates hi = FarFrr(t, 2.0);
  EXPECT_EQ(hi.far, 0.0);
  EXPECT_EQ(hi.frr, 1.0);
  const ErrorRates lo = FarFrr(t, -2.0);
  EXPECT_EQ(lo.far, 1.0);
  EXPECT_EQ(lo.frr, 0.0);
}

TEST(FarFrr, AcceptsAtEqualScore) {
  const ErrorRates r = FarFrr(Trials({0.5}, {0.5}), 0.5);
  EXPECT_EQ(r.far, 1.0);
  EXPECT_EQ(r.frr, 0.0);
}

TEST(FarFrr, Errors) {
  try {
    FarFrr(Trials({0.5}, {}), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyClass);
  }
  TrialSet ragged = Trials({0.5}, {0.1});
  ragged.genuine.pop_back();
  EXPECT_THROW(FarFrr(ragged, 0.0), Error);
}

TEST(Eer, SeparableIsZero) {
  const EerResult r = Eer(Trials({0.9, 0.8, 0.7}, {0.1, 0.2}));
  EXPECT_EQ(r.eer, 0.0);
  const ErrorRates at = FarFrr(Trials({0.9, 0.8, 0.7}, {0.1, 0.2}), r.threshold);
  EXPECT_EQ(at.far, 0.0);
  EXPECT_EQ(at.frr, 0.0);
}

TEST(Eer, IdenticalListsGiveHalf) {
  const std::vector<double> s = {0.1, 0.4, 0.35, 0.8, 0.2};
  EXPECT_DOUBLE_EQ(Eer(Trials(s, s)).eer, 0.5);
}

TEST(Eer, HandCaseIsExactlyOneQuarter) {
  const EerResult r = Eer(Trials({0.9, 0.4}, {0.6, 0.1}));
  EXPECT_EQ(r.eer, 0.25);
  EXPECT_GT(r.threshold, 0.4);
  EXPECT_LE(r.threshold, 0.6);
}

TEST(Eer, RandomIdenticalDistributionsNearHalf) {
  SplitMix64 rng(2024);
  TrialSet t;
  for (int i = 0; i < 10000; ++i) t.Add(rng.Uniform(), rng.Uniform() < 0.5);
  EXPECT_NEAR(Eer(t).eer, 0.5, 0.02);
}

TEST(Eer, BoundedForBalancedRandomScores) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    TrialSet t;
    for (int i = 0; i < 50; ++i) t.Add(rng.Gaussian(), i % 2 == 0);
    const double e = Eer(t).eer;
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 1.0);
  }
}

TEST(Eer, InvariantUnderIncreasingTransform) {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    TrialSet t, u;
    for (int i = 0; i < 40; ++i) {
      const bool g = rng.Uniform() < 0.5;
      const double s = rng.Gaussian() + (g ? 0.8 : 0.0);
      t.Add(s, g);
      u.Add(std::exp(3.0 * s) - 7.0, g);
    }
    t.Add(5.0, true);
    t.Add(-5.0, false);
    u.Add(std::exp(15.0) - 7.0, true);
    u.Add(std::exp(-15.0) - 7.0, false);
    EXPECT_DOUBLE_EQ(Eer(t).eer, Eer(u).eer);
  }
}

TEST(DetCurve, MonotoneRates) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    TrialSet t;
    for (int i = 0; i < 60; ++i) t.Add(std::round(rng.Gaussian() * 4.0) / 4.0, i % 3 != 0);
    const std::vector<DetPoint> det = DetCurve(t);
    ASSERT_FALSE(det.empty());
    for (size_t i = 1; i < det.size(); ++i) {
      EXPECT_GT(det[i].threshold, det[i - 1].threshold);
      EXPECT_LE(det[i].far, det[i - 1].far);
      EXPECT_GE(det[i].frr, det[i - 1].frr);
    }
    for (const DetPoint& p : det) {
      const ErrorRates r = FarFrr(t, p.threshold);
      EXPECT_EQ(r.far, p.far);
      EXPECT_EQ(r.frr, p.frr);
    }
  }
}

TEST(Cer, Cases) {
  const std::vector<std::string> truth = {"a", "b", "c", "d"};
  EXPECT_EQ(Cer(truth, truth), 0.0);
  const std::vector<std::string> wrong = {"b", "c", "d", "a"};
  EXPECT_EQ(Cer(wrong, truth), 1.0);
  const std::vector<std::string> one = {"a", "b", "c", "x"};
  EXPECT_EQ(Cer(one, truth), 0.25);
  EXPECT_THROW(Cer(std::vector<std::string>{}, std::vector<std::string>{}), Error);
  EXPECT_THROW(Cer(one, std::vector<std::string>{"a"}), Error);
}

}  // namespace
}  // namespace supervoice
