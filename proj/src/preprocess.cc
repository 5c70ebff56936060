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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "supervoice/errors.h"

namespace supervoice {

SilenceParams SilenceParams::ForRate(int sample_rate) {
  SilenceParams p;
  p.frame_len = static_cast<size_t>(sample_rate) / 20;
  return p;
}

void SilenceParams::Validate() const {
  if (frame_len < 1) throw Error(ErrorCode::kInvalidArgument, "frame_len must be >= 1");
  if (!(theta_ratio > 0.0 && theta_ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta_ratio must lie in (0, 1)");
  }
}

std::vector<bool> RetainedFrames(std::span<const double> frame_powers,
                                 double theta_ratio, size_t tolerance_c) {
  std::vector<bool> keep(frame_powers.size(), false);
  if (frame_powers.empty()) return keep;
  const auto [lo, hi] = std::minmax_element(frame_powers.begin(), frame_powers.end());
  if (*hi == *lo && *hi > 0.0) {
    // Constant nonzero power is not silence.
    std::fill(keep.begin(), keep.end(), true);
    return keep;
  }
  const double theta = *lo + (*hi - *lo) * theta_ratio;
  size_t counter = 0;
  for (size_t i = 0; i < frame_powers.size(); ++i) {
    counter = frame_powers[i] > theta ? 0 : counter + 1;
    keep[i] = counter <= tolerance_c;
  }
  return keep;
}

AudioBuffer RemoveSilence(const AudioBuffer& buffer, const SilenceParams& params) {
  params.Validate();
  if (buffer.empty()) throw Error(ErrorCode::kEmptyInput, "cannot remove silence from an empty buffer");
  const size_t n = buffer.size();
  const size_t k = params.frame_len;
  const size_t full = n / k;
  if (full == 0) return buffer;

  std::vector<double> powers(full);
  for (size_t f = 0; f < full; ++f) {
    double acc = 0.0;
    for (size_t i = f * k; i < (f + 1) * k; ++i) {
      const double s = buffer.samples[i];
      acc += s * s;
    }
    powers[f] = acc / static_cast<double>(k);
  }
  const std::vector<bool> keep =
      RetainedFrames(powers, params.theta_ratio, params.tolerance_c);

  AudioBuffer out;
  out.sample_rate = buffer.sample_rate;
  out.samples.reserve(n);
  for (size_t f = 0; f < full; ++f) {
    if (!keep[f]) continue;
    out.samples.insert(out.samples.end(), buffer.samples.begin() + f * k,
                       buffer.samples.begin() + (f + 1) * k);
  }
  out.samples.insert(out.samples.end(), buffer.samples.begin() + full * k,
                     buffer.samples.end());
  return out;
}

std::vector<double> DesignLowpass(size_t taps, double cutoff,
                                  double stopband_attenuation_db) {
  if (taps % 2 == 0) throw Error(ErrorCode::kInvalidArgument, "filter taps must be odd");
  if (!(cutoff > 0.0 && cutoff <= 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "cutoff must lie in (0, 0.5]");
  }
  const double a = stopband_attenuation_db;
  double beta = 0.0;
  if (a > 50.0) {
    beta = 0.1102 * (a - 8.7);
  } else if (a >= 21.0) {
    beta = 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
  }
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  const double center = static_cast<double>(taps - 1) / 2.0;
  std::vector<double> h(taps);
  double sum = 0.0;
  for (size_t n = 0; n < taps; ++n) {
    const double m = static_cast<double>(n) - center;
    const double x = 2.0 * cutoff * m;
    const double sinc = m == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = center > 0.0 ? m / center : 0.0;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[n] = 2.0 * cutoff * sinc * window;
    sum += h[n];
  }
  for (double& v : h) v /= sum;
  return h;
}

AudioBuffer Downsample(const AudioBuffer& buffer, const ResampleSpec& spec) {
  if (spec.source_rate <= 0 || spec.target_rate <= 0 ||
      spec.source_rate % spec.target_rate != 0) {
    throw Error(ErrorCode::kNonIntegerDecimation,
                std::to_string(spec.source_rate) + " -> " + std::to_string(spec.target_rate));
  }
  if (buffer.sample_rate != spec.source_rate) {
    throw Error(ErrorCode::kInvalidArgument, "buffer rate does not match ResampleSpec.source_rate");
  }
  const size_t d = static_cast<size_t>(spec.source_rate / spec.target_rate);
  const double cutoff = 0.9 * (static_cast<double>(spec.target_rate) / 2.0) / spec.source_rate;
  const std::vector<double> h =
      DesignLowpass(spec.filter_taps, cutoff, spec.stopband_attenuation_db);
  const ptrdiff_t half = static_cast<ptrdiff_t>(h.size() / 2);
  const ptrdiff_t n = static_cast<ptrdiff_t>(buffer.size());

  // Odd reflection about the first and last sample: x[-i] = 2 x[0] - x[i].
  // Constants and sinusoids continue smoothly past the ends; inputs shorter
  // than the filter are reflected again until the index lands inside.
  const std::vector<float>& x = buffer.samples;
  std::function<double(ptrdiff_t)> at = [&](ptrdiff_t i) -> double {
    if (n == 1) return x[0];
    if (i < 0) return 2.0 * x[0] - at(-i);
    if (i >= n) return 2.0 * x[n - 1] - at(2 * (n - 1) - i);
    return x[i];
  };

  AudioBuffer out;
  out.sample_rate = spec.target_rate;
  out.samples.resize((buffer.size() + d - 1) / d);
  for (size_t k = 0; k < out.samples.size(); ++k) {
    const ptrdiff_t center = static_cast<ptrdiff_t>(k * d);
    double acc = 0.0;
    if (center >= half && center + half < n) {
      const float* x = buffer.samples.data() + (center - half);
      for (size_t j = 0; j < h.size(); ++j) acc += h[j] * x[j];
    } else {
      for (size_t j = 0; j < h.size(); ++j) {
        acc += h[j] * at(center + static_cast<ptrdiff_t>(j) - half);
      }
    }
    out.samples[k] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace supervoice
