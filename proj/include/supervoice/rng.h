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

#ifndef SUPERVOICE_RNG_H_
#define SUPERVOICE_RNG_H_

#include <cmath>
#include <cstdint>
#include <numbers>

namespace supervoice {

// SplitMix64 (Steele, Lea & Flood). Every random draw in the toolkit goes
// through this generator so corpora, initializations and training runs are
// reproducible on any platform; the std:: distributions are deliberately not
// used because their algorithms are implementation-defined.
//
//   state += 0x9E3779B97F4A7C15
//   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t Next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return Mix(state_);
  }

  // Independent child stream; the parent advances by one draw.
  SplitMix64 Split() { return SplitMix64(Mix(Next() ^ 0x6A09E667F3BCC909ULL)); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n); n must be positive.
  uint64_t Below(uint64_t n) { return static_cast<uint64_t>(Uniform() * n); }

  // Box-Muller, one value per call.
  double Gaussian() {
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  static uint64_t Mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

// Stable seed for a named sub-stream, e.g. DeriveSeed(corpus_seed, speaker).
inline uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  return SplitMix64::Mix(seed * 0x9E3779B97F4A7C15ULL + SplitMix64::Mix(stream));
}

}  // namespace supervoice

#endif  // SUPERVOICE_RNG_H_
