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

#include "supervoice/neural/trainer.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "supervoice/errors.h"

namespace supervoice {
namespace {

template <typename T>
std::vector<Param<T>> AllParams(SpeakerModel<T>& model, Linear<T>& head) {
  std::vector<Param<T>> params = model.Params();
  for (Param<T> p : head.Params()) {
    p.name = "head." + p.name;
    params.push_back(p);
  }
  return params;
}

template <typename T>
std::string GradientDiagnostics(const std::vector<Param<T>>& params) {
  std::ostringstream os;
  double worst = 0.0;
  std::string worst_name = "(none)";
  size_t non_finite = 0;
  for (const Param<T>& p : params) {
    for (T g : p.grad->data) {
      if (!std::isfinite(g)) {
        ++non_finite;
        worst_name = p.name;
      } else if (std::abs(g) > worst && non_finite == 0) {
        worst = std::abs(g);
        worst_name = p.name;
      }
    }
  }
  os << non_finite << " non-finite gradient entries; largest |grad| " << worst << " in "
     << worst_name;
  return os.str();
}

}  // namespace

template <typename T>
Trainer<T>::Trainer(SpeakerModel<T>& model, size_t classes, TrainerOptions options)
    : model_(model),
      classes_(classes),
      options_(options),
      head_(model.config().embedding, classes),
      params_(),
      optimizer_(AllParams(model, head_), options.rmsprop) {
  if (classes < 2) throw Error(ErrorCode::kInvalidArgument, "training needs at least 2 classes");
  if (options_.micro_batch == 0) options_.micro_batch = 1;
  SplitMix64 rng(options.head_seed);
  head_.Init(rng);
  params_ = AllParams(model_, head_);
}

template <typename T>
void Trainer<T>::Pack(std::span<const TrainingWindow* const> batch, size_t begin, size_t end,
                      Tensor<T>& low, Tensor<T>& high) const {
  const ModelConfig& c = model_.config();
  const size_t n = end - begin;
  const size_t plane = c.hf_rows * c.hf_cols;
  low = Tensor<T>({n, c.window});
  high = Tensor<T>({n, 1, c.hf_rows, c.hf_cols});
  for (size_t i = 0; i < n; ++i) {
    const TrainingWindow& w = *batch[begin + i];
    if (w.low.size() != c.window || w.high.size() != plane) {
      throw Error(ErrorCode::kShapeMismatch, "training window does not match the model config");
    }
    std::copy(w.low.begin(), w.low.end(), low.ptr() + i * c.window);
    std::copy(w.high.begin(), w.high.end(), high.ptr() + i * plane);
  }
}

template <typename T>
StepResult Trainer<T>::Step(std::span<const TrainingWindow* const> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyInput, "empty training batch");
  for (Param<T>& p : params_) p.grad->Fill(T(0));
  const size_t total = batch.size();
  double loss = 0.0;
  size_t correct = 0;
  Tensor<T> low, high;
  for (size_t begin = 0; begin < total; begin += options_.micro_batch) {
    const size_t end = std::min(total, begin + options_.micro_batch);
    Pack(batch, begin, end, low, high);
    std::vector<int> labels;
    for (size_t i = begin; i < end; ++i) labels.push_back(batch[i]->label);

    const Tensor<T> emb = model_.Forward(low, high);
    const Tensor<T> logits = head_.Forward(emb);
    const double part = loss_.Forward(logits, labels);
    const double weight = static_cast<double>(end - begin) / total;
    loss += part * weight;
    const Tensor<T>& probs = loss_.probabilities();
    for (size_t i = 0; i < labels.size(); ++i) {
      const T* row = probs.ptr() + i * classes_;
      correct += static_cast<size_t>(std::max_element(row, row + classes_) - row) ==
                 static_cast<size_t>(labels[i]);
    }

    Tensor<T> d_logits = loss_.Backward();
    for (T& v : d_logits.data) v *= static_cast<T>(weight);
    model_.Backward(head_.Backward(d_logits));
  }
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNonFiniteLoss,
                "loss is not finite; " + GradientDiagnostics(params_));
  }
  for (const Param<T>& p : params_) {
    if (!p.grad->AllFinite()) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "gradient is not finite; " + GradientDiagnostics(params_));
    }
  }
  optimizer_.Step();
  return {loss, static_cast<double>(correct) / total};
}

template <typename T>
std::vector<int> Trainer<T>::Predict(std::span<const TrainingWindow* const> batch) {
  std::vector<int> out;
  Tensor<T> low, high;
  for (size_t begin = 0; begin < batch.size(); begin += options_.micro_batch) {
    const size_t end = std::min(batch.size(), begin + options_.micro_batch);
    Pack(batch, begin, end, low, high);
    const Tensor<T> logits = head_.Forward(model_.Forward(low, high));
    for (size_t i = 0; i < end - begin; ++i) {
      const T* row = logits.ptr() + i * classes_;
      out.push_back(static_cast<int>(std::max_element(row, row + classes_) - row));
    }
  }
  return out;
}

template class Trainer<float>;
template class Trainer<double>;

}  // namespace supervoice
