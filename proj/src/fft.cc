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

#include <cmath>
#include <numbers>
#include <utility>

#include "supervoice/errors.h"

namespace supervoice {

bool IsPowerOfTwo(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t NextPowerOfTwo(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Fft::Fft(size_t n) : n_(n), bit_reverse_(n) {
  if (!IsPowerOfTwo(n)) {
    throw Error(ErrorCode::kInvalidArgument, "FFT size must be a power of two");
  }
  size_t bits = 0;
  while ((size_t{1} << bits) < n) ++bits;
  for (size_t i = 0; i < n; ++i) {
    size_t r = 0;
    for (size_t b = 0; b < bits; ++b) {
      if (i & (size_t{1} << b)) r |= size_t{1} << (bits - 1 - b);
    }
    bit_reverse_[i] = r;
  }
  // Stage with butterfly span `len` reads its len/2 twiddles from offset
  // len/2 - 1, so the inner loop walks memory sequentially.
  twiddles_.reserve(n > 1 ? n - 1 : 0);
  for (size_t len = 2; len <= n; len <<= 1) {
    for (size_t j = 0; j < len / 2; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / len;
      twiddles_.emplace_back(std::cos(angle), std::sin(angle));
    }
  }
}

void Fft::Forward(std::span<std::complex<double>> data) const {
  Transform(data, false);
}

void Fft::Inverse(std::span<std::complex<double>> data) const {
  Transform(data, true);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

void Fft::Transform(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != n_) {
    throw Error(ErrorCode::kShapeMismatch, "FFT input length differs from plan size");
  }
  for (size_t i = 0; i < n_; ++i) {
    if (i < bit_reverse_[i]) std::swap(data[i], data[bit_reverse_[i]]);
  }
  for (size_t len = 2; len <= n_; len <<= 1) {
    const size_t half = len / 2;
    const std::complex<double>* tw = twiddles_.data() + (half - 1);
    for (size_t start = 0; start < n_; start += len) {
      for (size_t j = 0; j < half; ++j) {
        const std::complex<double> w = tw[j];
        const double wr = w.real();
        const double wi = inverse ? -w.imag() : w.imag();
        const std::complex<double> u = data[start + j];
        const std::complex<double> v = data[start + j + half];
        // Spelled out: operator* on std::complex takes the slow
        // Annex G path for inf/nan handling.
        const std::complex<double> t(wr * v.real() - wi * v.imag(),
                                     wr * v.imag() + wi * v.real());
        data[start + j] = u + t;
        data[start + j + half] = u - t;
      }
    }
  }
}

}  // namespace supervoice
