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

#include <cmath>
#include <string>

#include "supervoice/errors.h"

namespace supervoice {

void LivenessConfig::Validate() const {
  if (!(low1 < high1) || !(low2 < high2)) {
    throw Error(ErrorCode::kInvalidArgument, "liveness bands need low < high");
  }
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "liveness m must be >= 1");
}

const char* VerdictName(Verdict v) { return v == Verdict::kLive ? "Live" : "Spoof"; }

std::vector<double> NormalizedCumulativeEnergy(const Spectrogram& spec,
                                               const FrameSet& frames) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyFrameSet, "S_p needs at least one frame");
  for (size_t t : frames.indices) {
    if (t >= spec.cols) throw Error(ErrorCode::kInvalidArgument, "frame index outside spectrogram");
  }
  double total = 0.0;
  for (float v : spec.values) total += v;
  const double global_mean = total / static_cast<double>(spec.values.size());
  const double offset = static_cast<double>(frames.size()) * global_mean;

  std::vector<double> sp(spec.rows);
  for (size_t r = 0; r < spec.rows; ++r) {
    double acc = 0.0;
    for (size_t t : frames.indices) acc += spec.at(r, t);
    sp[r] = acc - offset;
  }
  return sp;
}

double BandSum(std::span<const double> sp, double freq_resolution,
               size_t bin_offset, double lo, double hi) {
  const auto first = static_cast<size_t>(std::ceil(lo / freq_resolution));
  const auto end = static_cast<size_t>(std::ceil(hi / freq_resolution));
  if (first < bin_offset || end > bin_offset + sp.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "band [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    ") Hz is not covered by S_p");
  }
  double acc = 0.0;
  for (size_t b = first; b < end; ++b) acc += sp[b - bin_offset];
  return acc;
}

double RatioOrSentinel(double numerator, double denominator) {
  if (denominator == 0.0 || !std::isfinite(denominator) || !std::isfinite(numerator)) {
    return kRatioSentinel;
  }
  return numerator / denominator;
}

double R1(std::span<const double> sp, double freq_resolution, const LivenessConfig& config) {
  return RatioOrSentinel(BandSum(sp, freq_resolution, 0, config.low1, config.high1),
                         BandSum(sp, freq_resolution, 0, 0.0, config.high1));
}

double R2(std::span<const double> sp, double freq_resolution, const LivenessConfig& config) {
  return RatioOrSentinel(BandSum(sp, freq_resolution, 0, 0.0, config.low2),
                         BandSum(sp, freq_resolution, 0, 0.0, config.high2));
}

Verdict LivenessDecision(double r1, double r2) {
  // Written so NaN falls through to Spoof.
  return (r1 > 0.0 && r2 > 0.0) ? Verdict::kLive : Verdict::kSpoof;
}

LivenessReport AssessLiveness(const Spectrogram& spec, const LivenessConfig& config) {
  config.Validate();
  if (spec.bin_offset != 0) {
    throw Error(ErrorCode::kInvalidArgument, "liveness needs the uncropped spectrogram");
  }
  const FrameSet frames = TopMFrames(spec, config.m, config.f_threshold);
  const std::vector<double> sp = NormalizedCumulativeEnergy(spec, frames);
  const double res = spec.freq_resolution;

  LivenessReport report;
  report.energies.ultrasonic = BandSum(sp, res, 0, config.low1, config.high1);
  report.energies.up_to_high1 = BandSum(sp, res, 0, 0.0, config.high1);
  report.energies.below_low2 = BandSum(sp, res, 0, 0.0, config.low2);
  report.energies.up_to_high2 = BandSum(sp, res, 0, 0.0, config.high2);
  // The verdict is a function of these four scalars only.
  const auto f = report.Features();
  report.r1 = RatioOrSentinel(f[0], f[1]);
  report.r2 = RatioOrSentinel(f[2], f[3]);
  report.verdict = LivenessDecision(report.r1, report.r2);
  return report;
}

LivenessReport AssessLiveness(const AudioBuffer& buffer, const LivenessConfig& config) {
  return AssessLiveness(Stft(buffer, StftConfig::Canonical()), config);
}

}  // namespace supervoice
