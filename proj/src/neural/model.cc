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

#include "supervoice/neural/model.h"

#include <sstream>

#include "supervoice/errors.h"

namespace supervoice {
namespace {

std::string JoinSizes(const std::vector<size_t>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::vector<size_t> SplitSizes(const std::string& s) {
  std::vector<size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoul(item));
  }
  return out;
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "model config: " + what);
}

}  // namespace

ModelConfig ModelConfig::Paper() { return ModelConfig{}; }

ModelConfig ModelConfig::Desk() {
  ModelConfig c;
  c.sinc_filters = 16;
  c.sinc_taps = 129;
  c.conv1d_channels = {16, 16};
  c.f_channels = {4, 4};
  c.t_channels = {4, 4};
  c.ft_channels = {2, 2, 2, 2};
  return c;
}

std::vector<size_t> ModelConfig::Cnn1Lengths() const {
  std::vector<size_t> lengths;
  if (window < sinc_taps || pool == 0) return lengths;
  size_t len = (window - sinc_taps + 1) / pool;
  lengths.push_back(len);
  for (size_t i = 0; i < conv1d_channels.size(); ++i) {
    if (len < conv1d_kernel) return {};
    len = (len - conv1d_kernel + 1) / pool;
    lengths.push_back(len);
  }
  return lengths;
}

size_t ModelConfig::Cnn1OutDim() const {
  const std::vector<size_t> lengths = Cnn1Lengths();
  if (lengths.empty()) return 0;
  const size_t channels = conv1d_channels.empty() ? sinc_filters : conv1d_channels.back();
  return channels * lengths.back();
}

void ModelConfig::Validate() const {
  Require(sample_rate > 0.0, "sample_rate must be positive");
  Require(sinc_filters > 0 && sinc_taps % 2 == 1, "sinc layer needs filters and odd taps");
  Require(!Cnn1Lengths().empty() && Cnn1Lengths().back() > 0, "CNN-1 stages do not fit the window");
  Require(f_channels.size() == f_dilations.size(), "F-filter channel/dilation count differ");
  Require(t_channels.size() == t_dilations.size(), "T-filter channel/dilation count differ");
  Require(ft_channels.size() == ft_dilations.size(), "F/T channel/dilation count differ");
  Require(!f_channels.empty() || !t_channels.empty() || !ft_channels.empty(),
          "CNN-2 has no convolution layers");
  Require(f_kernel % 2 == 1 && t_kernel % 2 == 1 && ft_kernel % 2 == 1,
          "CNN-2 kernels must be odd");
  Require(hf_rows >= pool_grid && hf_cols >= pool_grid && pool_grid > 0,
          "pooling grid larger than the spectrogram crop");
  Require(cnn2_out > 0 && embedding > 0, "output sizes must be positive");
}

std::map<std::string, std::string> ModelConfig::ToMap() const {
  std::ostringstream rate;
  rate.precision(17);
  rate << sample_rate;
  std::ostringstream slope;
  slope.precision(17);
  slope << leaky_slope;
  return {
      {"sample_rate", rate.str()},
      {"window", std::to_string(window)},
      {"sinc_filters", std::to_string(sinc_filters)},
      {"sinc_taps", std::to_string(sinc_taps)},
      {"conv1d_channels", JoinSizes(conv1d_channels)},
      {"conv1d_kernel", std::to_string(conv1d_kernel)},
      {"pool", std::to_string(pool)},
      {"hf_rows", std::to_string(hf_rows)},
      {"hf_cols", std::to_string(hf_cols)},
      {"f_channels", JoinSizes(f_channels)},
      {"f_kernel", std::to_string(f_kernel)},
      {"f_dilations", JoinSizes(f_dilations)},
      {"t_channels", JoinSizes(t_channels)},
      {"t_kernel", std::to_string(t_kernel)},
      {"t_dilations", JoinSizes(t_dilations)},
      {"ft_channels", JoinSizes(ft_channels)},
      {"ft_kernel", std::to_string(ft_kernel)},
      {"ft_dilations", JoinSizes(ft_dilations)},
      {"pool_grid", std::to_string(pool_grid)},
      {"cnn2_out", std::to_string(cnn2_out)},
      {"embedding", std::to_string(embedding)},
      {"leaky_slope", slope.str()},
  };
}

ModelConfig ModelConfig::FromMap(const std::map<std::string, std::string>& kv) {
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw Error(ErrorCode::kCorruptFile, std::string("model config lacks key ") + key);
    }
    return it->second;
  };
  ModelConfig c;
  try {
    c.sample_rate = std::stod(get("sample_rate"));
    c.window = std::stoul(get("window"));
    c.sinc_filters = std::stoul(get("sinc_filters"));
    c.sinc_taps = std::stoul(get("sinc_taps"));
    c.conv1d_channels = SplitSizes(get("conv1d_channels"));
    c.conv1d_kernel = std::stoul(get("conv1d_kernel"));
    c.pool = std::stoul(get("pool"));
    c.hf_rows = std::stoul(get("hf_rows"));
    c.hf_cols = std::stoul(get("hf_cols"));
    c.f_channels = SplitSizes(get("f_channels"));
    c.f_kernel = std::stoul(get("f_kernel"));
    c.f_dilations = SplitSizes(get("f_dilations"));
    c.t_channels = SplitSizes(get("t_channels"));
    c.t_kernel = std::stoul(get("t_kernel"));
    c.t_dilations = SplitSizes(get("t_dilations"));
    c.ft_channels = SplitSizes(get("ft_channels"));
    c.ft_kernel = std::stoul(get("ft_kernel"));
    c.ft_dilations = SplitSizes(get("ft_dilations"));
    c.pool_grid = std::stoul(get("pool_grid"));
    c.cnn2_out = std::stoul(get("cnn2_out"));
    c.embedding = std::stoul(get("embedding"));
    c.leaky_slope = std::stod(get("leaky_slope"));
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::kCorruptFile, std::string("model config value unreadable: ") + e.what());
  }
  return c;
}

template <typename T>
SpeakerModel<T>::SpeakerModel(const ModelConfig& config)
    : config_(config),
      cnn1_("cnn1."),
      cnn2_("cnn2."),
      fusion_(config.FusionInDim(), config.embedding) {
  config_.Validate();
  const ModelConfig& c = config_;

  auto sinc = std::make_unique<SincConv1d<T>>(c.sinc_filters, c.sinc_taps, c.sample_rate);
  sinc_ = sinc.get();
  cnn1_.Add(std::move(sinc));
  cnn1_.Add(std::make_unique<LayerNorm<T>>(c.sinc_filters));
  cnn1_.Add(std::make_unique<LeakyRelu<T>>(c.leaky_slope));
  cnn1_.Add(std::make_unique<MaxPool1d<T>>(c.pool));
  size_t channels = c.sinc_filters;
  for (size_t out : c.conv1d_channels) {
    cnn1_.Add(std::make_unique<Conv1d<T>>(channels, out, c.conv1d_kernel));
    cnn1_.Add(std::make_unique<LayerNorm<T>>(out));
    cnn1_.Add(std::make_unique<LeakyRelu<T>>(c.leaky_slope));
    cnn1_.Add(std::make_unique<MaxPool1d<T>>(c.pool));
    channels = out;
  }

  channels = 1;
  auto add_block = [&](size_t out, size_t kh, size_t kw, size_t dh, size_t dw) {
    cnn2_.Add(std::make_unique<Conv2d<T>>(channels, out, kh, kw, dh, dw));
    cnn2_.Add(std::make_unique<LayerNorm<T>>(out));
    cnn2_.Add(std::make_unique<LeakyRelu<T>>(c.leaky_slope));
    channels = out;
  };
  // F-filters run along frequency (rows), T-filters along time (columns).
  for (size_t i = 0; i < c.f_channels.size(); ++i) {
    add_block(c.f_channels[i], c.f_kernel, 1, c.f_dilations[i], 1);
  }
  for (size_t i = 0; i < c.t_channels.size(); ++i) {
    add_block(c.t_channels[i], 1, c.t_kernel, 1, c.t_dilations[i]);
  }
  for (size_t i = 0; i < c.ft_channels.size(); ++i) {
    add_block(c.ft_channels[i], c.ft_kernel, c.ft_kernel, c.ft_dilations[i], c.ft_dilations[i]);
  }
  cnn2_.Add(std::make_unique<AdaptiveAvgPool2d<T>>(c.pool_grid, c.pool_grid));
  cnn2_.Add(std::make_unique<Linear<T>>(channels * c.pool_grid * c.pool_grid, c.cnn2_out));
}

template <typename T>
void SpeakerModel<T>::Init(uint64_t seed) {
  SplitMix64 rng(seed);
  cnn1_.Init(rng);
  cnn2_.Init(rng);
  fusion_.Init(rng);
}

template <typename T>
Tensor<T> SpeakerModel<T>::Cnn1Forward(const Tensor<T>& low) {
  const bool shaped = low.rank() == 2 || (low.rank() == 3 && low.dim(1) == 1);
  if (!shaped) {
    throw Error(ErrorCode::kShapeMismatch, "CNN-1 input must be [B, window]; got " +
                                               ShapeString(low.shape));
  }
  if (low.shape.back() != config_.window) {
    throw Error(ErrorCode::kWindowLengthMismatch,
                "CNN-1 window must be " + std::to_string(config_.window) + " samples; got " +
                    std::to_string(low.shape.back()));
  }
  Tensor<T> y = cnn1_.Forward(low);
  y.shape = {y.dim(0), y.stride0()};
  return y;
}

template <typename T>
Tensor<T> SpeakerModel<T>::Cnn2Forward(const Tensor<T>& high) {
  if (high.rank() != 4 || high.dim(1) != 1 || high.dim(2) != config_.hf_rows ||
      high.dim(3) != config_.hf_cols) {
    throw Error(ErrorCode::kShapeMismatch,
                "CNN-2 input must be [B, 1, " + std::to_string(config_.hf_rows) + ", " +
                    std::to_string(config_.hf_cols) + "]; got " + ShapeString(high.shape));
  }
  return cnn2_.Forward(high);
}

template <typename T>
Tensor<T> SpeakerModel<T>::FuseForward(const Tensor<T>& low_features,
                                       const Tensor<T>& high_features) {
  const size_t low_dim = config_.Cnn1OutDim();
  if (low_features.rank() != 2 || high_features.rank() != 2 ||
      low_features.dim(0) != high_features.dim(0) || low_features.dim(1) != low_dim ||
      high_features.dim(1) != config_.cnn2_out) {
    throw Error(ErrorCode::kShapeMismatch, "fusion inputs " + ShapeString(low_features.shape) +
                                               " and " + ShapeString(high_features.shape));
  }
  const size_t batch = low_features.dim(0);
  const size_t fused_dim = low_dim + config_.cnn2_out;
  Tensor<T> fused({batch, fused_dim});
  for (size_t b = 0; b < batch; ++b) {
    std::copy_n(low_features.ptr() + b * low_dim, low_dim, fused.ptr() + b * fused_dim);
    std::copy_n(high_features.ptr() + b * config_.cnn2_out, config_.cnn2_out,
                fused.ptr() + b * fused_dim + low_dim);
  }
  batch_ = batch;
  return fusion_.Forward(fused);
}

template <typename T>
Tensor<T> SpeakerModel<T>::Forward(const Tensor<T>& low, const Tensor<T>& high) {
  if (low.dim(0) != high.dim(0)) {
    throw Error(ErrorCode::kShapeMismatch, "low and high batches differ");
  }
  Tensor<T> lf = Cnn1Forward(low);
  Tensor<T> hf = Cnn2Forward(high);
  return FuseForward(lf, hf);
}

template <typename T>
void SpeakerModel<T>::Backward(const Tensor<T>& d_embedding) {
  Tensor<T> d_fused = fusion_.Backward(d_embedding);
  const size_t low_dim = config_.Cnn1OutDim();
  const size_t fused_dim = low_dim + config_.cnn2_out;
  const size_t low_channels =
      config_.conv1d_channels.empty() ? config_.sinc_filters : config_.conv1d_channels.back();
  Tensor<T> d_low({batch_, low_channels, low_dim / low_channels});
  Tensor<T> d_high({batch_, config_.cnn2_out});
  for (size_t b = 0; b < batch_; ++b) {
    std::copy_n(d_fused.ptr() + b * fused_dim, low_dim, d_low.ptr() + b * low_dim);
    std::copy_n(d_fused.ptr() + b * fused_dim + low_dim, config_.cnn2_out,
                d_high.ptr() + b * config_.cnn2_out);
  }
  cnn2_.Backward(d_high);
  cnn1_.Backward(d_low);
}

template <typename T>
std::vector<Param<T>> SpeakerModel<T>::Params() {
  std::vector<Param<T>> out = cnn1_.Params();
  for (const Param<T>& p : cnn2_.Params()) out.push_back(p);
  for (Param<T> p : fusion_.Params()) {
    p.name = "fusion." + p.name;
    out.push_back(p);
  }
  return out;
}

template <typename T>
void SpeakerModel<T>::ZeroGrad() {
  for (Param<T>& p : Params()) p.grad->Fill(T(0));
}

template <typename T>
size_t SpeakerModel<T>::ParameterCount() {
  size_t n = 0;
  for (const Param<T>& p : Params()) n += p.value->size();
  return n;
}

template class SpeakerModel<float>;
template class SpeakerModel<double>;

}  // namespace supervoice
