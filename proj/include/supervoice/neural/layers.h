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

#ifndef SUPERVOICE_NEURAL_LAYERS_H_
#define SUPERVOICE_NEURAL_LAYERS_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "supervoice/neural/tensor.h"
#include "supervoice/rng.h"

namespace supervoice {

// A learnable tensor and the gradient accumulated into it by Backward.
template <typename T>
struct Param {
  std::string name;
  Tensor<T>* value = nullptr;
  Tensor<T>* grad = nullptr;
};

// Layers cache what they need during Forward; Backward must follow the
// Forward it refers to and adds into the parameter gradients.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> Forward(const Tensor<T>& x) = 0;
  virtual Tensor<T> Backward(const Tensor<T>& dy) = 0;
  virtual std::vector<Param<T>> Params() { return {}; }
  virtual void Init(SplitMix64& /*rng*/) {}
  virtual std::string Kind() const = 0;

  void ZeroGrad() {
    for (Param<T>& p : Params()) p.grad->Fill(T(0));
  }
};

// Hamming-windowed band-pass of length `taps` (odd) between effective
// cutoffs lo_hz < hi_hz:
//   h[n] = w[n] * (g(hi, n) - g(lo, n)),  g(f, n) = 2f/fs * sinc(2 pi f n / fs)
// with n centred on zero. Equal cutoffs give the all-zero filter.
template <typename T>
std::vector<T> SincBandPassTaps(double lo_hz, double hi_hz, size_t taps, double sample_rate);

// Band edges after the validity map applied on every forward pass:
//   f1' = |f1|,  band = max(|f2 - f1|, min_band),  f2' = min(f1' + band, fs / 2)
struct SincCutoffs {
  double low = 0.0;
  double high = 0.0;
};
SincCutoffs ConstrainCutoffs(double f1, double f2, double sample_rate, double min_band = 50.0);

// Sinc-parameterized convolution. Input [B, L] or [B, 1, L]; output
// [B, filters, L - taps + 1]. Learnable parameters are the raw edges f1, f2.
template <typename T>
class SincConv1d : public Layer<T> {
 public:
  SincConv1d(size_t filters, size_t taps, double sample_rate, double min_hz = 30.0,
             double max_hz = 8000.0);

  Tensor<T> Forward(const Tensor<T>& x) override;
  Tensor<T> Backward(const Tensor<T>& dy) override;
  std::vector<Param<T>> Params() override;
  // Mel-spaced bands tiling [min_hz, max_hz]; draws nothing from rng.
  void Init(SplitMix64& rng) override;
  std::string Kind() const override { return "SincConv1d"; }

  size_t filters() const { return filters_; }
  size_t taps() const { return taps_; }
  double sample_rate() const { return sample_rate_; }
  // The constructed [filters, taps] kernel for the current parameters.
  Tensor<T> Kernel() const;

  Tensor<T> f1, f2, f1_grad, f2_grad;

 private:
  size_t filters_, taps_;
  double sample_rate_, min_hz_, max_hz_;
  Tensor<T> input_;
  Tensor<T> kernel_;
};

// Valid 1-D convolution (cross-correlation). [B, in, L] -> [B, out, L - k + 1].
template <typename T>
class Conv1d : public Layer<T> {
 public:
  Conv1d(size_t in_channels, size_t out_channels, size_t kernel);

  Tensor<T> Forward(const Tensor<T>& x) override;
  Tensor<T> Backward(const Tensor<T>& dy) override;
  std::vector<Param<T>> Params() override;
  void Init(SplitMix64& rng) override;
  std::string Kind() const override { return "Conv1d"; }

  Tensor<T> weight, bias, weight_grad, bias_grad;

 private:
  size_t in_, out_, k_;
  Tensor<T> input_;
};

// Dilated 2-D convolution with "same" zero padding. Kernel sides must be
// odd. [B, in, H, W] -> [B, out, H, W].
template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(size_t in_channels, size_t out_channels, size_t kernel_h, size_t kernel_w,
         size_t dilation_h, size_t dilation_w);

  Tensor<T> Forward(const Tensor<T>& x) override;
  Tensor<T> Backward(const Tensor<T>& dy) override;
  std::vector<Param<T>> Params() override;
  void Init(SplitMix64& rng) override;
  std::string Kind() const override { return "Conv2d"; }

  Tensor<T> weight, bias, weight_grad, bias_grad;

 private:
  size_t in_, out_, kh_, kw_, dh_, dw_;
  Tensor<T> input_;
};

// Per-sample normalization over every feature of [B, C, ...] with a
// per-channel gain and shift.
template <typename T>
class LayerNorm : public Layer<T> {
 public:
  explicit LayerNorm(size_t channels, double eps = 1e-5);

  Tensor<T> Forward(const Tensor<T>& x) override;
  Tensor<T> Backward(const Tensor<T>& dy) override;
  std::vector<Param<T>> Params() override;
  void Init(SplitMix64& rng) override;
  std::string Kind() const override { return "LayerNorm"; }

  Tensor<T> gain, shift, gain_grad, shift_grad;

 private:
  size_t channels_;
  double eps_;
  Tensor<T> normalized_;
  std::vector<double> inv_std_;
};

template <typename T>
class LeakyRelu : public Layer<T> {
 public:
  explicit LeakyRelu(double slope = 0.2) : slope_(static_cast<T>(slope)) {}

  Tensor<T> Forward(const Tensor<T>& x) override;
  Tensor<T> Backward(const Tensor<T>& dy) override;
  std::string Kind() const override { return "LeakyRelu"; }

 private:
  T slope_;
  Tensor<T> input_;
};

// Non-overlapping max pooling along the last axis of [B, C, L]; output
// length floor(L / k). Ties resolve to the first position.
template <typename T>
class MaxPool1d : public Layer<T> {
 public:
  explicit MaxPool1d(size_t k) : k_(k) {}

  Tensor<T> Forward(const Tensor<T>& x) override;
  Tensor<T> Backward(const Tensor<T>& dy) override;
  std::string Kind() const override { return "MaxPool1d"; }

 private:
  size_t k_;
  std::vector<size_t> input_shape_;
  std::vector<size_t> argmax_;
};

// [B, C, H, W] -> [B, C, out_h, out_w]; cell i spans
// [floor(i H / out_h), ceil((i + 1) H / out_h)).
template <typename T>
class AdaptiveAvgPool2d : public Layer<T> {
 public:
  AdaptiveAvgPool2d(size_t out_h, size_t out_w) : out_h_(out_h), out_w_(out_w) {}

  Tensor<T> Forward(const Tensor<T>& x) override;
  Tensor<T> Backward(const Tensor<T>& dy) override;
  std::string Kind() const override { return "AdaptiveAvgPool2d"; }

 private:
  size_t out_h_, out_w_;
  std::vector<size_t> input_shape_;
};

// Fully connected layer over the flattened trailing axes: [B, ...] -> [B, out].
template <typename T>
class Linear : public Layer<T> {
 public:
  Linear(size_t in_features, size_t out_features);

  Tensor<T> Forward(const Tensor<T>& x) override;
  Tensor<T> Backward(const Tensor<T>& dy) override;
  std::vector<Param<T>> Params() override;
  void Init(SplitMix64& rng) override;
  std::string Kind() const override { return "Linear"; }

  size_t in_features() const { return in_; }
  size_t out_features() const { return out_; }

  Tensor<T> weight, bias, weight_grad, bias_grad;  // weight is [out, in]

 private:
  size_t in_, out_;
  Tensor<T> input_;
};

// Mean negative log-likelihood of integer labels under softmax(logits).
template <typename T>
class SoftmaxCrossEntropy {
 public:
  // logits [B, C]; returns the batch-mean loss.
  T Forward(const Tensor<T>& logits, std::span<const int> labels);
  // Gradient of the mean loss with respect to the logits.
  Tensor<T> Backward() const;
  const Tensor<T>& probabilities() const { return probs_; }

 private:
  Tensor<T> probs_;
  std::vector<int> labels_;
};

// Layers applied in order; parameter names are prefixed "<prefix><index>.".
template <typename T>
class Sequential {
 public:
  explicit Sequential(std::string prefix = "") : prefix_(std::move(prefix)) {}

  Layer<T>& Add(std::unique_ptr<Layer<T>> layer);
  Tensor<T> Forward(const Tensor<T>& x);
  Tensor<T> Backward(const Tensor<T>& dy);
  std::vector<Param<T>> Params();
  void Init(SplitMix64& rng);
  size_t size() const { return layers_.size(); }
  Layer<T>& at(size_t i) { return *layers_[i]; }

 private:
  std::string prefix_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

}  // namespace supervoice

#endif  // SUPERVOICE_NEURAL_LAYERS_H_
