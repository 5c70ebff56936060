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

#ifndef SUPERVOICE_NEURAL_TRAINER_H_
#define SUPERVOICE_NEURAL_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "supervoice/neural/layers.h"
#include "supervoice/neural/model.h"
#include "supervoice/neural/optimizer.h"

namespace supervoice {

// One aligned training window: `low` holds config.window samples and `high`
// the hf_rows x hf_cols dB crop, row-major.
struct TrainingWindow {
  std::vector<float> low;
  std::vector<float> high;
  int label = 0;
};

struct TrainerOptions {
  RmsPropOptions rmsprop;
  // Windows per forward/backward pass; gradients of a step are summed over
  // micro-batches, so this bounds memory without changing the update.
  size_t micro_batch = 8;
  uint64_t head_seed = 0x5eed;
};

struct StepResult {
  double loss = 0.0;
  double accuracy = 0.0;  // on the step's batch, before the update
};

// Speaker-classification training: the model's embedding feeds a linear
// head over `classes` speakers and a softmax cross-entropy loss. The head
// lives here only and never reaches a checkpoint.
template <typename T>
class Trainer {
 public:
  Trainer(SpeakerModel<T>& model, size_t classes, TrainerOptions options = {});

  // One RMSprop update over the batch. Throws Error(kNonFiniteLoss), with
  // the largest gradient in the message, before touching any parameter.
  StepResult Step(std::span<const TrainingWindow* const> batch);

  std::vector<int> Predict(std::span<const TrainingWindow* const> batch);

  Linear<T>& head() { return head_; }
  size_t classes() const { return classes_; }

 private:
  void Pack(std::span<const TrainingWindow* const> batch, size_t begin, size_t end,
            Tensor<T>& low, Tensor<T>& high) const;

  SpeakerModel<T>& model_;
  size_t classes_;
  TrainerOptions options_;
  Linear<T> head_;
  SoftmaxCrossEntropy<T> loss_;
  std::vector<Param<T>> params_;
  RmsProp<T> optimizer_;
};

}  // namespace supervoice

#endif  // SUPERVOICE_NEURAL_TRAINER_H_
