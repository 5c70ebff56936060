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

#ifndef SUPERVOICE_NEURAL_MODEL_H_
#define SUPERVOICE_NEURAL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "supervoice/neural/layers.h"
#include "supervoice/neural/tensor.h"

namespace supervoice {

// Architecture of the two-stream embedding network. Paper() is the full
// published size; Desk() keeps every stage and dimension contract except
// the widths, so it trains on one CPU core.
struct ModelConfig {
  // CNN-1: raw 16 kHz waveform windows.
  double sample_rate = 16000.0;
  size_t window = 3200;
  size_t sinc_filters = 80;
  size_t sinc_taps = 251;
  std::vector<size_t> conv1d_channels = {60, 60};
  size_t conv1d_kernel = 5;
  size_t pool = 3;

  // CNN-2: dB spectrogram crops.
  size_t hf_rows = 426;
  size_t hf_cols = 75;
  std::vector<size_t> f_channels = {64, 64};
  size_t f_kernel = 9;
  std::vector<size_t> f_dilations = {1, 2};
  std::vector<size_t> t_channels = {64, 64};
  size_t t_kernel = 9;
  std::vector<size_t> t_dilations = {1, 2};
  std::vector<size_t> ft_channels = {48, 48, 48, 48};
  size_t ft_kernel = 5;
  std::vector<size_t> ft_dilations = {2, 4, 8, 16};
  size_t pool_grid = 4;
  size_t cnn2_out = 512;

  size_t embedding = 2048;
  double leaky_slope = 0.2;

  static ModelConfig Paper();
  static ModelConfig Desk();

  // Length of the CNN-1 feature map after each pooling stage.
  std::vector<size_t> Cnn1Lengths() const;
  size_t Cnn1OutDim() const;
  size_t FusionInDim() const { return Cnn1OutDim() + cnn2_out; }

  // Throws Error(kInvalidArgument) when the stages do not chain.
  void Validate() const;

  // Flat key=value form stored in checkpoints.
  std::map<std::string, std::string> ToMap() const;
  static ModelConfig FromMap(const std::map<std::string, std::string>& kv);

  bool operator==(const ModelConfig&) const = default;
};

// CNN-1, CNN-2 and the fusion layer. Each conv stage is
// conv -> layer norm -> LeakyReLU, followed in CNN-1 by max pooling.
template <typename T>
class SpeakerModel {
 public:
  explicit SpeakerModel(const ModelConfig& config);

  SpeakerModel(const SpeakerModel&) = delete;
  SpeakerModel& operator=(const SpeakerModel&) = delete;

  // Deterministic initialization from `seed`.
  void Init(uint64_t seed);

  // [B, window] or [B, 1, window] -> [B, Cnn1OutDim()].
  // Throws Error(kWindowLengthMismatch) or Error(kShapeMismatch).
  Tensor<T> Cnn1Forward(const Tensor<T>& low);
  // [B, 1, hf_rows, hf_cols] -> [B, cnn2_out].
  Tensor<T> Cnn2Forward(const Tensor<T>& high);
  // [B, Cnn1OutDim()] and [B, cnn2_out] concatenated (low first) -> [B, embedding].
  Tensor<T> FuseForward(const Tensor<T>& low_features, const Tensor<T>& high_features);

  Tensor<T> Forward(const Tensor<T>& low, const Tensor<T>& high);
  // Gradient of the embedding; accumulates into every parameter gradient.
  void Backward(const Tensor<T>& d_embedding);

  std::vector<Param<T>> Params();
  void ZeroGrad();
  size_t ParameterCount();

  const ModelConfig& config() const { return config_; }
  SincConv1d<T>& sinc() { return *sinc_; }
  Linear<T>& fusion() { return fusion_; }

 private:
  ModelConfig config_;
  Sequential<T> cnn1_;
  Sequential<T> cnn2_;
  Linear<T> fusion_;
  SincConv1d<T>* sinc_ = nullptr;
  size_t batch_ = 0;
};

}  // namespace supervoice

#endif  // SUPERVOICE_NEURAL_MODEL_H_
