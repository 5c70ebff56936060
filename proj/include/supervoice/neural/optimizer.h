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

#ifndef SUPERVOICE_NEURAL_OPTIMIZER_H_
#define SUPERVOICE_NEURAL_OPTIMIZER_H_

#include <vector>

#include "supervoice/neural/layers.h"

namespace supervoice {

struct RmsPropOptions {
  double lr = 0.001;
  double alpha = 0.95;
  double epsilon = 1e-7;
};

// v <- alpha v + (1 - alpha) g^2;  theta <- theta - lr g / (sqrt(v) + eps)
template <typename T>
class RmsProp {
 public:
  RmsProp(std::vector<Param<T>> params, RmsPropOptions options = {});

  void Step();
  const RmsPropOptions& options() const { return options_; }
  // Running squared-gradient averages, parallel to the parameter list.
  const std::vector<Tensor<T>>& accumulators() const { return square_avg_; }

 private:
  std::vector<Param<T>> params_;
  RmsPropOptions options_;
  std::vector<Tensor<T>> square_avg_;
};

}  // namespace supervoice

#endif  // SUPERVOICE_NEURAL_OPTIMIZER_H_
