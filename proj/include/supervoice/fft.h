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

#ifndef SUPERVOICE_FFT_H_
#define SUPERVOICE_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace supervoice {

bool IsPowerOfTwo(size_t n);
size_t NextPowerOfTwo(size_t n);

// Iterative radix-2 FFT with precomputed twiddles. Reusable across calls of
// the same size; not thread-safe per instance.
class Fft {
 public:
  explicit Fft(size_t n);

  size_t size() const { return n_; }

  // In-place forward transform, X[k] = sum_n x[n] e^{-2 pi i k n / N}.
  void Forward(std::span<std::complex<double>> data) const;
  // In-place inverse transform including the 1/N factor.
  void Inverse(std::span<std::complex<double>> data) const;

 private:
  void Transform(std::span<std::complex<double>> data, bool inverse) const;

  size_t n_;
  std::vector<size_t> bit_reverse_;
  std::vector<std::complex<double>> twiddles_;
};

}  // namespace supervoice

#endif  // SUPERVOICE_FFT_H_
