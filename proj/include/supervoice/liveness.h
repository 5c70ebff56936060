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

#ifndef SUPERVOICE_LIVENESS_H_
#define SUPERVOICE_LIVENESS_H_

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "supervoice/audio_io.h"
#include "supervoice/spectrum.h"

namespace supervoice {

struct LivenessConfig {
  double low1 = 24000.0;
  double high1 = 48000.0;
  double low2 = 1000.0;
  double high2 = 4000.0;
  size_t m = 100;
  double f_threshold = 20000.0;

  void Validate() const;
};

enum class Verdict { kLive, kSpoof };

const char* VerdictName(Verdict v);

// The accumulated band energies of S_p that the verdict is computed from.
struct BandEnergies {
  double ultrasonic = 0.0;  // sum over [low1, high1)
  double up_to_high1 = 0.0; // sum over [0, high1)
  double below_low2 = 0.0;  // sum over [0, low2)
  double up_to_high2 = 0.0; // sum over [0, high2)
};

struct LivenessReport {
  static constexpr size_t kFeatureCount = 4;

  double r1 = 0.0;
  double r2 = 0.0;
  Verdict verdict = Verdict::kSpoof;
  BandEnergies energies;

  std::array<double, kFeatureCount> Features() const {
    return {energies.ultrasonic, energies.up_to_high1, energies.below_low2,
            energies.up_to_high2};
  }
};

// Returned by R1/R2 when the denominator is zero; never counts as positive.
constexpr double kRatioSentinel = -std::numeric_limits<double>::infinity();

// S_p(f) = sum_{t in frames} S(f, t) - M * g, with g the mean of S over every
// bin and every frame. One value per spectrogram row.
// Throws Error(kEmptyFrameSet).
std::vector<double> NormalizedCumulativeEnergy(const Spectrogram& spec,
                                               const FrameSet& frames);

// Sum of sp over rows whose absolute bin b satisfies lo <= b * res < hi.
// Throws Error(kInvalidArgument) when [lo, hi) extends past the last row.
double BandSum(std::span<const double> sp, double freq_resolution,
               size_t bin_offset, double lo, double hi);

double RatioOrSentinel(double numerator, double denominator);

// sp must start at bin 0 and reach high1 (resp. high2).
double R1(std::span<const double> sp, double freq_resolution, const LivenessConfig& config);
double R2(std::span<const double> sp, double freq_resolution, const LivenessConfig& config);

// Live iff r1 > 0 and r2 > 0. The sentinel and NaN are non-positive.
Verdict LivenessDecision(double r1, double r2);

// Full gate on a dB spectrogram starting at bin 0.
LivenessReport AssessLiveness(const Spectrogram& spec, const LivenessConfig& config = {});

// Canonical STFT of `buffer`, then AssessLiveness.
LivenessReport AssessLiveness(const AudioBuffer& buffer, const LivenessConfig& config = {});

}  // namespace supervoice

#endif  // SUPERVOICE_LIVENESS_H_
