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

#ifndef SUPERVOICE_TESTS_GRADCHECK_H_
#define SUPERVOICE_TESTS_GRADCHECK_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "supervoice/neural/layers.h"
#include "supervoice/neural/model.h"
#include "supervoice/rng.h"

namespace supervoice::testing {

// Worst disagreement between an analytic gradient and the finite-difference
// oracle. Errors are |a - n| / max(|a|, |n|, 0.01 * max_j |n_j|): relative
// per component, with a floor at 1% of the gradient's scale so components
// that are numerically zero do not divide by rounding noise.
struct GradCheckResult {
  double max_rel_error = 0.0;
  size_t components = 0;
  std::string worst;

  void Merge(const GradCheckResult& other) {
    components += other.components;
    if (other.max_rel_error > max_rel_error) {
      max_rel_error = other.max_rel_error;
      worst = other.worst;
    }
  }
};

// Five-point central difference, exact for polynomials up to degree four.
inline double FivePoint(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

inline double Step(double v) { return 1e-3 * std::max(1.0, std::abs(v)); }

// Picks at most `limit` distinct indices below n, all of them when n <= limit.
inline std::vector<size_t> SampleIndices(size_t n, size_t limit, SplitMix64& rng) {
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  if (n <= limit) return idx;
  for (size_t i = 0; i < limit; ++i) std::swap(idx[i], idx[i + rng.Below(n - i)]);
  idx.resize(limit);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline GradCheckResult Compare(const std::string& label, const std::vector<double>& analytic,
                               const std::vector<double>& numeric) {
  GradCheckResult r;
  double scale = 0.0;
  for (double n : numeric) scale = std::max(scale, std::abs(n));
  for (size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic[i], n = numeric[i];
    const double denom = std::max({std::abs(a), std::abs(n), 0.01 * scale, 1e-300});
    const double err = std::abs(a - n) / denom;
    if (!(err <= r.max_rel_error)) {
      r.max_rel_error = std::isnan(err) ? INFINITY : err;
      r.worst = label + "[" + std::to_string(i) + "] analytic " + std::to_string(a) +
                " numeric " + std::to_string(n);
    }
  }
  r.components = analytic.size();
  return r;
}

// A layer under test, constructible at both precisions.
struct LayerCase {
  std::string name;
  std::function<std::unique_ptr<Layer<float>>()> make_float;
  std::function<std::unique_ptr<Layer<double>>()> make_double;
  std::vector<size_t> input_shape;
  // Fills the input; layers with kinks keep every sample clear of them.
  std::function<void(SplitMix64&, Tensor<double>&)> fill;
  // Sets parameters after Init; defaults to a uniform jitter.
  std::function<void(SplitMix64&, Layer<double>&)> perturb;
};

template <typename Make>
LayerCase MakeCase(std::string name, Make make, std::vector<size_t> input_shape) {
  LayerCase c;
  c.name = std::move(name);
  c.make_float = [make] { return make(float{}); };
  c.make_double = [make] { return make(double{}); };
  c.input_shape = std::move(input_shape);
  c.fill = [](SplitMix64& rng, Tensor<double>& x) {
    for (double& v : x.data) v = rng.Uniform(-1.0, 1.0);
  };
  c.perturb = [](SplitMix64& rng, Layer<double>& layer) {
    for (Param<double>& p : layer.Params()) {
      for (double& v : p.value->data) v += rng.Uniform(-0.3, 0.3);
    }
  };
  return c;
}

// Checks d(sum r * y)/dx and every parameter gradient of one random
// instance. The analytic side runs at precision T; the oracle always runs
// in double.
template <typename T>
GradCheckResult CheckLayer(const LayerCase& c, uint64_t seed, size_t max_components = 256) {
  SplitMix64 rng(seed);
  std::unique_ptr<Layer<double>> oracle = c.make_double();
  oracle->Init(rng);
  c.perturb(rng, *oracle);

  std::unique_ptr<Layer<T>> layer;
  if constexpr (std::is_same_v<T, float>) {
    layer = c.make_float();
  } else {
    layer = c.make_double();
  }
  {
    std::vector<Param<double>> src = oracle->Params();
    std::vector<Param<T>> dst = layer->Params();
    for (size_t i = 0; i < src.size(); ++i) *dst[i].value = src[i].value->template Cast<T>();
  }

  Tensor<double> x(c.input_shape);
  c.fill(rng, x);
  const Tensor<double> y0 = oracle->Forward(x);
  Tensor<double> r(y0.shape);
  for (double& v : r.data) v = rng.Uniform(-1.0, 1.0);

  layer->ZeroGrad();
  layer->Forward(x.Cast<T>());
  const Tensor<T> dx = layer->Backward(r.Cast<T>());

  auto objective = [&]() {
    const Tensor<double> y = oracle->Forward(x);
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) s += r.data[i] * y.data[i];
    return s;
  };
  auto probe = [&](double& slot) {
    const double saved = slot;
    const double d = FivePoint(
        [&](double v) {
          slot = v;
          return objective();
        },
        saved, Step(saved));
    slot = saved;
    return d;
  };

  GradCheckResult result;
  {
    std::vector<double> a, n;
    for (size_t i : SampleIndices(x.size(), max_components, rng)) {
      a.push_back(dx.data[i]);
      n.push_back(probe(x.data[i]));
    }
    result.Merge(Compare(c.name + " input", a, n));
  }
  std::vector<Param<double>> oparams = oracle->Params();
  std::vector<Param<T>> params = layer->Params();
  for (size_t p = 0; p < params.size(); ++p) {
    std::vector<double> a, n;
    for (size_t i : SampleIndices(params[p].value->size(), max_components, rng)) {
      a.push_back(params[p].grad->data[i]);
      n.push_back(probe(oparams[p].value->data[i]));
    }
    result.Merge(Compare(c.name + " " + params[p].name, a, n));
  }
  return result;
}

// Values spaced at least `gap` apart in random order, so max pooling and
// LeakyReLU see no ties and no sign changes under a finite-difference step.
inline void FillDistinct(SplitMix64& rng, Tensor<double>& x, double gap) {
  std::vector<double> v(x.size());
  for (size_t i = 0; i < v.size(); ++i) {
    v[i] = (static_cast<double>(i) - static_cast<double>(v.size()) / 2.0 + 0.5) * gap;
  }
  for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.Below(i)]);
  x.data = v;
}

inline void JitterSinc(SplitMix64& rng, Layer<double>& layer) {
  auto& sinc = dynamic_cast<SincConv1d<double>&>(layer);
  for (size_t f = 0; f < sinc.filters(); ++f) {
    // Inside the band limits so no clamp of the cutoff map is active.
    sinc.f1.data[f] = sinc.f1.data[f] * 0.9 + rng.Uniform(5.0, 20.0);
    sinc.f2.data[f] = sinc.f2.data[f] * 0.9 + rng.Uniform(60.0, 90.0);
  }
}

// Every layer kind of the network, at sizes small enough to probe each
// component.
inline std::vector<LayerCase> AllLayerCases() {
  std::vector<LayerCase> cases;
  {
    LayerCase c = MakeCase(
        "SincConv1d",
        [](auto t) {
          using T = decltype(t);
          return std::unique_ptr<Layer<T>>(new SincConv1d<T>(3, 15, 16000.0));
        },
        {2, 40});
    c.perturb = JitterSinc;
    cases.push_back(std::move(c));
  }
  cases.push_back(MakeCase(
      "Conv1d",
      [](auto t) {
        using T = decltype(t);
        return std::unique_ptr<Layer<T>>(new Conv1d<T>(3, 4, 5));
      },
      {2, 3, 12}));
  cases.push_back(MakeCase(
      "Conv2d(3x3,dil2x1)",
      [](auto t) {
        using T = decltype(t);
        return std::unique_ptr<Layer<T>>(new Conv2d<T>(2, 3, 3, 3, 2, 1));
      },
      {2, 2, 7, 6}));
  cases.push_back(MakeCase(
      "Conv2d(5x1,dil1x2)",
      [](auto t) {
        using T = decltype(t);
        return std::unique_ptr<Layer<T>>(new Conv2d<T>(2, 2, 5, 1, 1, 2));
      },
      {1, 2, 6, 5}));
  cases.push_back(MakeCase(
      "Conv2d(1x3,dil1x3)",
      [](auto t) {
        using T = decltype(t);
        return std::unique_ptr<Layer<T>>(new Conv2d<T>(1, 2, 1, 3, 1, 3));
      },
      {2, 1, 4, 8}));
  cases.push_back(MakeCase(
      "LayerNorm",
      [](auto t) {
        using T = decltype(t);
        return std::unique_ptr<Layer<T>>(new LayerNorm<T>(3));
      },
      {2, 3, 5}));
  cases.push_back(MakeCase(
      "LayerNorm4d",
      [](auto t) {
        using T = decltype(t);
        return std::unique_ptr<Layer<T>>(new LayerNorm<T>(2));
      },
      {2, 2, 3, 4}));
  {
    LayerCase c = MakeCase(
        "LeakyRelu",
        [](auto t) {
          using T = decltype(t);
          return std::unique_ptr<Layer<T>>(new LeakyRelu<T>(0.2));
        },
        {2, 3, 7});
    c.fill = [](SplitMix64& rng, Tensor<double>& x) { FillDistinct(rng, x, 0.05); };
    cases.push_back(std::move(c));
  }
  {
    LayerCase c = MakeCase(
        "MaxPool1d",
        [](auto t) {
          using T = decltype(t);
          return std::unique_ptr<Layer<T>>(new MaxPool1d<T>(3));
        },
        {2, 2, 11});
    c.fill = [](SplitMix64& rng, Tensor<double>& x) { FillDistinct(rng, x, 0.05); };
    cases.push_back(std::move(c));
  }
  cases.push_back(MakeCase(
      "AdaptiveAvgPool2d",
      [](auto t) {
        using T = decltype(t);
        return std::unique_ptr<Layer<T>>(new AdaptiveAvgPool2d<T>(3, 2));
      },
      {2, 2, 7, 5}));
  cases.push_back(MakeCase(
      "Linear",
      [](auto t) {
        using T = decltype(t);
        return std::unique_ptr<Layer<T>>(new Linear<T>(12, 5));
      },
      {3, 3, 4}));
  return cases;
}

// Gradient of the batch-mean cross-entropy with respect to the logits.
template <typename T>
GradCheckResult CheckSoftmaxCrossEntropy(uint64_t seed) {
  SplitMix64 rng(seed);
  const size_t batch = 4, classes = 5;
  Tensor<double> logits({batch, classes});
  for (double& v : logits.data) v = rng.Uniform(-3.0, 3.0);
  std::vector<int> labels(batch);
  for (int& l : labels) l = static_cast<int>(rng.Below(classes));

  SoftmaxCrossEntropy<T> loss;
  loss.Forward(logits.Cast<T>(), labels);
  const Tensor<T> grad = loss.Backward();

  SoftmaxCrossEntropy<double> oracle;
  std::vector<double> a, n;
  for (size_t i = 0; i < logits.size(); ++i) {
    const double saved = logits.data[i];
    n.push_back(FivePoint(
        [&](double v) {
          logits.data[i] = v;
          return oracle.Forward(logits, labels);
        },
        saved, Step(saved)));
    logits.data[i] = saved;
    a.push_back(grad.data[i]);
  }
  return Compare("SoftmaxCrossEntropy logits", a, n);
}

// A model small enough to probe, with every stage of the full network.
inline ModelConfig MicroConfig() {
  ModelConfig c;
  c.window = 200;
  c.sinc_filters = 3;
  c.sinc_taps = 9;
  c.conv1d_channels = {3, 3};
  c.conv1d_kernel = 3;
  c.hf_rows = 9;
  c.hf_cols = 8;
  c.f_channels = {2, 2};
  c.f_kernel = 3;
  c.f_dilations = {1, 2};
  c.t_channels = {2, 2};
  c.t_kernel = 3;
  c.t_dilations = {1, 2};
  c.ft_channels = {2, 2};
  c.ft_kernel = 3;
  c.ft_dilations = {2, 4};
  c.pool_grid = 2;
  c.cnn2_out = 5;
  c.embedding = 6;
  return c;
}

}  // namespace supervoice::testing

#endif  // SUPERVOICE_TESTS_GRADCHECK_H_
