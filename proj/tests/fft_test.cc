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

#include "supervoice/fft.h"

#include <gtest/gtest.h>

#include <complex>
#include <vector>

#include "supervoice/errors.h"
#include "supervoice/rng.h"
#include "test_util.h"

namespace supervoice {
namespace {

TEST(Fft, PowerOfTwoHelpers) {
  EXPECT_TRUE(IsPowerOfTwo(1));
  EXPECT_TRUE(IsPowerOfTwo(2048));
  EXPECT_FALSE(IsPowerOfTwo(0));
  EXPECT_FALSE(IsPowerOfTwo(1000));
  EXPECT_EQ(NextPowerOfTwo(1000), 1024u);
  EXPECT_EQ(NextPowerOfTwo(1024), 1024u);
  EXPECT_EQ(NextPowerOfTwo(1), 1u);
}

TEST(Fft, RejectsNonPowerOfTwo) {
  EXPECT_THROW(Fft(0), Error);
  EXPECT_THROW(Fft(12), Error);
}

class FftOracle : public ::testing::TestWithParam<size_t> {};

TEST_P(FftOracle, MatchesDirectDft) {
  const size_t n = GetParam();
  SplitMix64 rng(n);
  std::vector<double> x(n);
  for (double& v : x) v = rng.Uniform(-1.0, 1.0);
  std::vector<std::complex<double>> data(x.begin(), x.end());
  Fft(n).Forward(data);
  const auto ref = testing::DirectDft(x);
  double scale = 0.0;
  for (const auto& c : ref) scale = std::max(scale, static_cast<double>(std::abs(c)));
  for (size_t k = 0; k < n; ++k) {
    EXPECT_NEAR(data[k].real(), static_cast<double>(ref[k].real()), 1e-11 * scale) << k;
    EXPECT_NEAR(data[k].imag(), static_cast<double>(ref[k].imag()), 1e-11 * scale) << k;
  }
}

TEST_P(FftOracle, InverseRecoversInput) {
  const size_t n = GetParam();
  SplitMix64 rng(n + 99);
  std::vector<std::complex<double>> data(n);
  for (auto& c : data) c = {rng.Uniform(-1.0, 1.0), rng.Uniform(-1.0, 1.0)};
  const auto original = data;
  Fft fft(n);
  fft.Forward(data);
  fft.Inverse(data);
  for (size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(data[i].real(), original[i].real(), 1e-12);
    EXPECT_NEAR(data[i].imag(), original[i].imag(), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, FftOracle, ::testing::Values(1, 2, 4, 8, 64, 256, 2048));

TEST(Fft, ImpulseIsFlat) {
  std::vector<std::complex<double>> data(16);
  data[0] = 1.0;
  Fft(16).Forward(data);
  for (const auto& c : data) EXPECT_NEAR(std::abs(c - std::complex<double>(1.0)), 0.0, 1e-15);
}

TEST(Fft, SizeMismatchThrows) {
  std::vector<std::complex<double>> data(8);
  EXPECT_THROW(Fft(16).Forward(data), Error);
}

}  // namespace
}  // namespace supervoice
