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

#ifndef SUPERVOICE_TESTS_TEST_UTIL_H_
#define SUPERVOICE_TESTS_TEST_UTIL_H_

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <unistd.h>
#include <vector>

#include "supervoice/audio_io.h"
#include "supervoice/rng.h"

namespace supervoice::testing {

// O(N^2) reference transform evaluated in long double.
inline std::vector<std::complex<long double>> DirectDft(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<std::complex<long double>> out(n);
  for (size_t k = 0; k < n; ++k) {
    long double re = 0.0L, im = 0.0L;
    for (size_t t = 0; t < n; ++t) {
      const long double angle =
          -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * t) % n) / n;
      re += x[t] * std::cos(angle);
      im += x[t] * std::sin(angle);
    }
    out[k] = {re, im};
  }
  return out;
}

inline AudioBuffer Tone(double freq, double amplitude, int rate, size_t n, double phase = 0.0) {
  AudioBuffer b;
  b.sample_rate = rate;
  b.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    b.samples[i] = static_cast<float>(
        amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate + phase));
  }
  return b;
}

inline AudioBuffer Noise(double amplitude, int rate, size_t n, uint64_t seed) {
  SplitMix64 rng(seed);
  AudioBuffer b;
  b.sample_rate = rate;
  b.samples.resize(n);
  for (float& v : b.samples) v = static_cast<float>(rng.Uniform(-amplitude, amplitude));
  return b;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("supervoice_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace supervoice::testing

#endif  // SUPERVOICE_TESTS_TEST_UTIL_H_
