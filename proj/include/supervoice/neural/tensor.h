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

#ifndef SUPERVOICE_NEURAL_TENSOR_H_
#define SUPERVOICE_NEURAL_TENSOR_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace supervoice {

// Dense row-major array. T is float in production and double in the
// gradient-check test mode.
template <typename T>
struct Tensor {
  std::vector<size_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<size_t> dims, T fill = T(0))
      : shape(std::move(dims)), data(NumElements(shape), fill) {}

  static size_t NumElements(const std::vector<size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), size_t{1}, std::multiplies<size_t>());
  }

  size_t size() const { return data.size(); }
  size_t rank() const { return shape.size(); }
  size_t dim(size_t i) const { return shape[i]; }
  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  // Elements per leading-axis slice.
  size_t stride0() const { return shape.empty() || shape[0] == 0 ? 0 : size() / shape[0]; }

  void Fill(T value) { std::fill(data.begin(), data.end(), value); }

  bool AllFinite() const {
    for (T v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  template <typename U>
  Tensor<U> Cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }
};

std::string ShapeString(const std::vector<size_t>& shape);

}  // namespace supervoice

#endif  // SUPERVOICE_NEURAL_TENSOR_H_
