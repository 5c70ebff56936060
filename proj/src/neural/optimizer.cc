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

#include "supervoice/neural/optimizer.h"

#include <cmath>

namespace supervoice {

template <typename T>
RmsProp<T>::RmsProp(std::vector<Param<T>> params, RmsPropOptions options)
    : params_(std::move(params)), options_(options) {
  square_avg_.reserve(params_.size());
  for (const Param<T>& p : params_) square_avg_.emplace_back(p.value->shape);
}

template <typename T>
void RmsProp<T>::Step() {
  const T lr = static_cast<T>(options_.lr);
  const T alpha = static_cast<T>(options_.alpha);
  const T one_minus_alpha = static_cast<T>(1.0 - options_.alpha);
  const T eps = static_cast<T>(options_.epsilon);
  for (size_t i = 0; i < params_.size(); ++i) {
    T* theta = params_[i].value->ptr();
    const T* g = params_[i].grad->ptr();
    T* v = square_avg_[i].ptr();
    const size_t n = params_[i].value->size();
    for (size_t j = 0; j < n; ++j) {
      v[j] = alpha * v[j] + one_minus_alpha * g[j] * g[j];
      theta[j] -= lr * g[j] / (std::sqrt(v[j]) + eps);
    }
  }
}

template class RmsProp<float>;
template class RmsProp<double>;

}  // namespace supervoice
