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

#include "supervoice/neural/layers.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "supervoice/errors.h"

namespace supervoice {
namespace {

// Four running sums in a fixed order: deterministic, and the compiler can
// keep them in separate registers.
template <typename T>
inline T Dot(const T* __restrict a, const T* __restrict b, size_t n) {
  T s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

template <typename T>
inline void Axpy(T alpha, const T* __restrict x, T* __restrict y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
inline T Sum(const T* x, size_t n) {
  T s = 0;
  for (size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

void ExpectShape(bool ok, const char* layer, const std::vector<size_t>& got) {
  if (!ok) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(layer) + " received input of shape " + ShapeString(got));
  }
}

template <typename T>
void UniformInit(Tensor<T>& t, double fan_in, SplitMix64& rng) {
  const double bound = std::sqrt(1.0 / fan_in);
  for (T& v : t.data) v = static_cast<T>(rng.Uniform(-bound, bound));
}

double Mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double InverseMel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> Hamming(size_t n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  for (size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / (n - 1));
  }
  return w;
}

// g(f, n) = 2f/fs * sinc(2 pi f n / fs) and its derivative in f.
double SincLowpass(double f, double n, double fs) {
  if (n == 0.0) return 2.0 * f / fs;
  return std::sin(2.0 * std::numbers::pi * f * n / fs) / (std::numbers::pi * n);
}

double SincLowpassDerivative(double f, double n, double fs) {
  return 2.0 * std::cos(2.0 * std::numbers::pi * f * n / fs) / fs;
}

}  // namespace

std::string ShapeString(const std::vector<size_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------- sinc

template <typename T>
std::vector<T> SincBandPassTaps(double lo_hz, double hi_hz, size_t taps, double sample_rate) {
  if (taps % 2 == 0) throw Error(ErrorCode::kInvalidArgument, "sinc filter length must be odd");
  const std::vector<double> window = Hamming(taps);
  const double centre = static_cast<double>(taps / 2);
  std::vector<T> h(taps);
  for (size_t k = 0; k < taps; ++k) {
    const double n = static_cast<double>(k) - centre;
    h[k] = static_cast<T>(window[k] * (SincLowpass(hi_hz, n, sample_rate) -
                                       SincLowpass(lo_hz, n, sample_rate)));
  }
  return h;
}

SincCutoffs ConstrainCutoffs(double f1, double f2, double sample_rate, double min_band) {
  const double nyquist = sample_rate / 2.0;
  const double low = std::min(std::abs(f1), nyquist - min_band);
  const double band = std::max(std::abs(f2 - f1), min_band);
  return {low, std::min(low + band, nyquist)};
}

template <typename T>
SincConv1d<T>::SincConv1d(size_t filters, size_t taps, double sample_rate, double min_hz,
                          double max_hz)
    : f1({filters}),
      f2({filters}),
      f1_grad({filters}),
      f2_grad({filters}),
      filters_(filters),
      taps_(taps),
      sample_rate_(sample_rate),
      min_hz_(min_hz),
      max_hz_(max_hz) {
  if (filters == 0 || taps % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sinc layer needs filters > 0 and odd length");
  }
}

template <typename T>
void SincConv1d<T>::Init(SplitMix64& /*rng*/) {
  const double lo = Mel(min_hz_);
  const double hi = Mel(max_hz_);
  for (size_t f = 0; f < filters_; ++f) {
    f1.data[f] = static_cast<T>(InverseMel(lo + (hi - lo) * f / filters_));
    f2.data[f] = static_cast<T>(InverseMel(lo + (hi - lo) * (f + 1) / filters_));
  }
}

template <typename T>
std::vector<Param<T>> SincConv1d<T>::Params() {
  return {{"f1", &f1, &f1_grad}, {"f2", &f2, &f2_grad}};
}

template <typename T>
Tensor<T> SincConv1d<T>::Kernel() const {
  Tensor<T> kernel({filters_, taps_});
  for (size_t f = 0; f < filters_; ++f) {
    const SincCutoffs c = ConstrainCutoffs(f1.data[f], f2.data[f], sample_rate_);
    const std::vector<T> h = SincBandPassTaps<T>(c.low, c.high, taps_, sample_rate_);
    std::copy(h.begin(), h.end(), kernel.ptr() + f * taps_);
  }
  return kernel;
}

template <typename T>
Tensor<T> SincConv1d<T>::Forward(const Tensor<T>& x) {
  const bool ok = (x.rank() == 2 || (x.rank() == 3 && x.dim(1) == 1)) &&
                  x.shape.back() >= taps_;
  ExpectShape(ok, "SincConv1d", x.shape);
  input_ = x;
  kernel_ = Kernel();
  const size_t batch = x.dim(0);
  const size_t len = x.shape.back();
  const size_t out_len = len - taps_ + 1;
  Tensor<T> y({batch, filters_, out_len});
  for (size_t b = 0; b < batch; ++b) {
    const T* xb = x.ptr() + b * len;
    for (size_t f = 0; f < filters_; ++f) {
      T* yr = y.ptr() + (b * filters_ + f) * out_len;
      const T* kf = kernel_.ptr() + f * taps_;
      for (size_t k = 0; k < taps_; ++k) Axpy(kf[k], xb + k, yr, out_len);
    }
  }
  return y;
}

template <typename T>
Tensor<T> SincConv1d<T>::Backward(const Tensor<T>& dy) {
  const size_t batch = input_.dim(0);
  const size_t len = input_.shape.back();
  const size_t out_len = len - taps_ + 1;
  ExpectShape(dy.shape == std::vector<size_t>{batch, filters_, out_len}, "SincConv1d backward",
              dy.shape);
  Tensor<T> dx(input_.shape);
  std::vector<double> dkernel(filters_ * taps_, 0.0);
  for (size_t b = 0; b < batch; ++b) {
    const T* xb = input_.ptr() + b * len;
    T* dxb = dx.ptr() + b * len;
    for (size_t f = 0; f < filters_; ++f) {
      const T* dyr = dy.ptr() + (b * filters_ + f) * out_len;
      const T* kf = kernel_.ptr() + f * taps_;
      for (size_t k = 0; k < taps_; ++k) {
        dkernel[f * taps_ + k] += Dot(dyr, xb + k, out_len);
        Axpy(kf[k], dyr, dxb + k, out_len);
      }
    }
  }

  const std::vector<double> window = Hamming(taps_);
  const double centre = static_cast<double>(taps_ / 2);
  const double nyquist = sample_rate_ / 2.0;
  constexpr double kMinBand = 50.0;
  for (size_t f = 0; f < filters_; ++f) {
    const double raw1 = f1.data[f];
    const double raw2 = f2.data[f];
    const SincCutoffs c = ConstrainCutoffs(raw1, raw2, sample_rate_, kMinBand);
    double d_low = 0.0, d_high = 0.0;
    for (size_t k = 0; k < taps_; ++k) {
      const double n = static_cast<double>(k) - centre;
      const double g = dkernel[f * taps_ + k] * window[k];
      d_high += g * SincLowpassDerivative(c.high, n, sample_rate_);
      d_low -= g * SincLowpassDerivative(c.low, n, sample_rate_);
    }
    // Chain through the validity map.
    const double s1 = raw1 < 0.0 ? -1.0 : 1.0;
    const bool low_clamped = std::abs(raw1) > nyquist - kMinBand;
    const double dlow_d1 = low_clamped ? 0.0 : s1;
    const double diff = raw2 - raw1;
    const bool band_clamped = std::abs(diff) < kMinBand;
    const double sd = diff < 0.0 ? -1.0 : 1.0;
    const double dband_d1 = band_clamped ? 0.0 : -sd;
    const double dband_d2 = band_clamped ? 0.0 : sd;
    const bool high_clamped = c.low + std::max(std::abs(diff), kMinBand) > nyquist;
    const double dhigh_d1 = high_clamped ? 0.0 : dlow_d1 + dband_d1;
    const double dhigh_d2 = high_clamped ? 0.0 : dband_d2;
    f1_grad.data[f] += static_cast<T>(d_low * dlow_d1 + d_high * dhigh_d1);
    f2_grad.data[f] += static_cast<T>(d_high * dhigh_d2);
  }
  return dx;
}

// ---------------------------------------------------------------- conv1d

template <typename T>
Conv1d<T>::Conv1d(size_t in_channels, size_t out_channels, size_t kernel)
    : weight({out_channels, in_channels, kernel}),
      bias({out_channels}),
      weight_grad({out_channels, in_channels, kernel}),
      bias_grad({out_channels}),
      in_(in_channels),
      out_(out_channels),
      k_(kernel) {}

template <typename T>
void Conv1d<T>::Init(SplitMix64& rng) {
  UniformInit(weight, static_cast<double>(in_ * k_), rng);
  bias.Fill(T(0));
}

template <typename T>
std::vector<Param<T>> Conv1d<T>::Params() {
  return {{"weight", &weight, &weight_grad}, {"bias", &bias, &bias_grad}};
}

template <typename T>
Tensor<T> Conv1d<T>::Forward(const Tensor<T>& x) {
  ExpectShape(x.rank() == 3 && x.dim(1) == in_ && x.dim(2) >= k_, "Conv1d", x.shape);
  input_ = x;
  const size_t batch = x.dim(0), len = x.dim(2), out_len = len - k_ + 1;
  Tensor<T> y({batch, out_, out_len});
  for (size_t b = 0; b < batch; ++b) {
    for (size_t o = 0; o < out_; ++o) {
      T* yr = y.ptr() + (b * out_ + o) * out_len;
      std::fill(yr, yr + out_len, bias.data[o]);
      for (size_t i = 0; i < in_; ++i) {
        const T* xr = x.ptr() + (b * in_ + i) * len;
        const T* w = weight.ptr() + (o * in_ + i) * k_;
        for (size_t k = 0; k < k_; ++k) Axpy(w[k], xr + k, yr, out_len);
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> Conv1d<T>::Backward(const Tensor<T>& dy) {
  const size_t batch = input_.dim(0), len = input_.dim(2), out_len = len - k_ + 1;
  ExpectShape(dy.shape == std::vector<size_t>{batch, out_, out_len}, "Conv1d backward", dy.shape);
  Tensor<T> dx(input_.shape);
  for (size_t b = 0; b < batch; ++b) {
    for (size_t o = 0; o < out_; ++o) {
      const T* dyr = dy.ptr() + (b * out_ + o) * out_len;
      bias_grad.data[o] += Sum(dyr, out_len);
      for (size_t i = 0; i < in_; ++i) {
        const T* xr = input_.ptr() + (b * in_ + i) * len;
        T* dxr = dx.ptr() + (b * in_ + i) * len;
        const T* w = weight.ptr() + (o * in_ + i) * k_;
        T* dw = weight_grad.ptr() + (o * in_ + i) * k_;
        for (size_t k = 0; k < k_; ++k) {
          dw[k] += Dot(dyr, xr + k, out_len);
          Axpy(w[k], dyr, dxr + k, out_len);
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- conv2d

template <typename T>
Conv2d<T>::Conv2d(size_t in_channels, size_t out_channels, size_t kernel_h, size_t kernel_w,
                  size_t dilation_h, size_t dilation_w)
    : weight({out_channels, in_channels, kernel_h, kernel_w}),
      bias({out_channels}),
      weight_grad({out_channels, in_channels, kernel_h, kernel_w}),
      bias_grad({out_channels}),
      in_(in_channels),
      out_(out_channels),
      kh_(kernel_h),
      kw_(kernel_w),
      dh_(dilation_h),
      dw_(dilation_w) {
  if (kernel_h % 2 == 0 || kernel_w % 2 == 0 || dilation_h == 0 || dilation_w == 0) {
    throw Error(ErrorCode::kInvalidArgument, "Conv2d needs odd kernel sides and dilation >= 1");
  }
}

template <typename T>
void Conv2d<T>::Init(SplitMix64& rng) {
  UniformInit(weight, static_cast<double>(in_ * kh_ * kw_), rng);
  bias.Fill(T(0));
}

template <typename T>
std::vector<Param<T>> Conv2d<T>::Params() {
  return {{"weight", &weight, &weight_grad}, {"bias", &bias, &bias_grad}};
}

namespace {

// Valid output range [lo, hi) for a tap displaced by `offset` along an axis
// of length n.
struct Span {
  size_t lo, hi;
};

Span TapSpan(ptrdiff_t offset, size_t n) {
  const ptrdiff_t sn = static_cast<ptrdiff_t>(n);
  const ptrdiff_t lo = std::max<ptrdiff_t>(0, -offset);
  const ptrdiff_t hi = std::min<ptrdiff_t>(sn, sn - offset);
  if (hi <= lo) return {0, 0};
  return {static_cast<size_t>(lo), static_cast<size_t>(hi)};
}

}  // namespace

template <typename T>
Tensor<T> Conv2d<T>::Forward(const Tensor<T>& x) {
  ExpectShape(x.rank() == 4 && x.dim(1) == in_, "Conv2d", x.shape);
  input_ = x;
  const size_t batch = x.dim(0), h = x.dim(2), w = x.dim(3), plane = h * w;
  const ptrdiff_t ph = static_cast<ptrdiff_t>((kh_ / 2) * dh_);
  const ptrdiff_t pw = static_cast<ptrdiff_t>((kw_ / 2) * dw_);
  Tensor<T> y({batch, out_, h, w});
  for (size_t b = 0; b < batch; ++b) {
    for (size_t o = 0; o < out_; ++o) {
      T* yp = y.ptr() + (b * out_ + o) * plane;
      std::fill(yp, yp + plane, bias.data[o]);
      for (size_t i = 0; i < in_; ++i) {
        const T* xp = x.ptr() + (b * in_ + i) * plane;
        const T* wk = weight.ptr() + (o * in_ + i) * kh_ * kw_;
        for (size_t ky = 0; ky < kh_; ++ky) {
          const ptrdiff_t r = static_cast<ptrdiff_t>(ky * dh_) - ph;
          const Span rows = TapSpan(r, h);
          for (size_t kx = 0; kx < kw_; ++kx) {
            const ptrdiff_t c = static_cast<ptrdiff_t>(kx * dw_) - pw;
            const Span cols = TapSpan(c, w);
            const T wv = wk[ky * kw_ + kx];
            const size_t n = cols.hi - cols.lo;
            if (n == 0) continue;
            for (size_t yy = rows.lo; yy < rows.hi; ++yy) {
              Axpy(wv, xp + (yy + r) * w + cols.lo + c, yp + yy * w + cols.lo, n);
            }
          }
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::Backward(const Tensor<T>& dy) {
  const size_t batch = input_.dim(0), h = input_.dim(2), w = input_.dim(3), plane = h * w;
  ExpectShape(dy.shape == std::vector<size_t>{batch, out_, h, w}, "Conv2d backward", dy.shape);
  const ptrdiff_t ph = static_cast<ptrdiff_t>((kh_ / 2) * dh_);
  const ptrdiff_t pw = static_cast<ptrdiff_t>((kw_ / 2) * dw_);
  Tensor<T> dx(input_.shape);
  for (size_t b = 0; b < batch; ++b) {
    for (size_t o = 0; o < out_; ++o) {
      const T* dyp = dy.ptr() + (b * out_ + o) * plane;
      bias_grad.data[o] += Sum(dyp, plane);
      for (size_t i = 0; i < in_; ++i) {
        const T* xp = input_.ptr() + (b * in_ + i) * plane;
        T* dxp = dx.ptr() + (b * in_ + i) * plane;
        const T* wk = weight.ptr() + (o * in_ + i) * kh_ * kw_;
        T* dwk = weight_grad.ptr() + (o * in_ + i) * kh_ * kw_;
        for (size_t ky = 0; ky < kh_; ++ky) {
          const ptrdiff_t r = static_cast<ptrdiff_t>(ky * dh_) - ph;
          const Span rows = TapSpan(r, h);
          for (size_t kx = 0; kx < kw_; ++kx) {
            const ptrdiff_t c = static_cast<ptrdiff_t>(kx * dw_) - pw;
            const Span cols = TapSpan(c, w);
            const size_t n = cols.hi - cols.lo;
            if (n == 0) continue;
            const T wv = wk[ky * kw_ + kx];
            T acc = 0;
            for (size_t yy = rows.lo; yy < rows.hi; ++yy) {
              const T* dyr = dyp + yy * w + cols.lo;
              acc += Dot(dyr, xp + (yy + r) * w + cols.lo + c, n);
              Axpy(wv, dyr, dxp + (yy + r) * w + cols.lo + c, n);
            }
            dwk[ky * kw_ + kx] += acc;
          }
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- layer norm

template <typename T>
LayerNorm<T>::LayerNorm(size_t channels, double eps)
    : gain({channels}, T(1)),
      shift({channels}),
      gain_grad({channels}),
      shift_grad({channels}),
      channels_(channels),
      eps_(eps) {}

template <typename T>
void LayerNorm<T>::Init(SplitMix64& /*rng*/) {
  gain.Fill(T(1));
  shift.Fill(T(0));
}

template <typename T>
std::vector<Param<T>> LayerNorm<T>::Params() {
  return {{"gain", &gain, &gain_grad}, {"shift", &shift, &shift_grad}};
}

template <typename T>
Tensor<T> LayerNorm<T>::Forward(const Tensor<T>& x) {
  ExpectShape(x.rank() >= 2 && x.dim(1) == channels_ && x.size() > 0, "LayerNorm", x.shape);
  const size_t batch = x.dim(0), per = x.stride0(), inner = per / channels_;
  normalized_ = Tensor<T>(x.shape);
  inv_std_.assign(batch, 0.0);
  Tensor<T> y(x.shape);
  for (size_t b = 0; b < batch; ++b) {
    const T* xb = x.ptr() + b * per;
    double mean = 0.0;
    for (size_t j = 0; j < per; ++j) mean += xb[j];
    mean /= per;
    double var = 0.0;
    for (size_t j = 0; j < per; ++j) var += (xb[j] - mean) * (xb[j] - mean);
    var /= per;
    const double inv = 1.0 / std::sqrt(var + eps_);
    inv_std_[b] = inv;
    T* nb = normalized_.ptr() + b * per;
    T* yb = y.ptr() + b * per;
    for (size_t c = 0; c < channels_; ++c) {
      for (size_t j = c * inner; j < (c + 1) * inner; ++j) {
        nb[j] = static_cast<T>((xb[j] - mean) * inv);
        yb[j] = gain.data[c] * nb[j] + shift.data[c];
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> LayerNorm<T>::Backward(const Tensor<T>& dy) {
  ExpectShape(dy.shape == normalized_.shape, "LayerNorm backward", dy.shape);
  const size_t batch = dy.dim(0), per = dy.stride0(), inner = per / channels_;
  Tensor<T> dx(dy.shape);
  std::vector<double> dn(per);
  for (size_t b = 0; b < batch; ++b) {
    const T* dyb = dy.ptr() + b * per;
    const T* nb = normalized_.ptr() + b * per;
    double mean_dn = 0.0, mean_dn_n = 0.0;
    for (size_t c = 0; c < channels_; ++c) {
      double dg = 0.0, ds = 0.0;
      for (size_t j = c * inner; j < (c + 1) * inner; ++j) {
        dg += static_cast<double>(dyb[j]) * nb[j];
        ds += dyb[j];
        dn[j] = static_cast<double>(dyb[j]) * gain.data[c];
        mean_dn += dn[j];
        mean_dn_n += dn[j] * nb[j];
      }
      gain_grad.data[c] += static_cast<T>(dg);
      shift_grad.data[c] += static_cast<T>(ds);
    }
    mean_dn /= per;
    mean_dn_n /= per;
    T* dxb = dx.ptr() + b * per;
    for (size_t j = 0; j < per; ++j) {
      dxb[j] = static_cast<T>(inv_std_[b] * (dn[j] - mean_dn - nb[j] * mean_dn_n));
    }
  }
  return dx;
}

// ---------------------------------------------------------------- activations, pooling

template <typename T>
Tensor<T> LeakyRelu<T>::Forward(const Tensor<T>& x) {
  input_ = x;
  Tensor<T> y(x.shape);
  for (size_t i = 0; i < x.size(); ++i) y.data[i] = x.data[i] > 0 ? x.data[i] : slope_ * x.data[i];
  return y;
}

template <typename T>
Tensor<T> LeakyRelu<T>::Backward(const Tensor<T>& dy) {
  ExpectShape(dy.shape == input_.shape, "LeakyRelu backward", dy.shape);
  Tensor<T> dx(dy.shape);
  for (size_t i = 0; i < dy.size(); ++i) {
    dx.data[i] = input_.data[i] > 0 ? dy.data[i] : slope_ * dy.data[i];
  }
  return dx;
}

template <typename T>
Tensor<T> MaxPool1d<T>::Forward(const Tensor<T>& x) {
  ExpectShape(x.rank() == 3 && x.dim(2) >= k_ && k_ > 0, "MaxPool1d", x.shape);
  input_shape_ = x.shape;
  const size_t rows = x.dim(0) * x.dim(1), len = x.dim(2), out_len = len / k_;
  Tensor<T> y({x.dim(0), x.dim(1), out_len});
  argmax_.assign(rows * out_len, 0);
  for (size_t r = 0; r < rows; ++r) {
    const T* xr = x.ptr() + r * len;
    for (size_t t = 0; t < out_len; ++t) {
      size_t best = t * k_;
      for (size_t j = t * k_ + 1; j < (t + 1) * k_; ++j) {
        if (xr[j] > xr[best]) best = j;
      }
      y.data[r * out_len + t] = xr[best];
      argmax_[r * out_len + t] = r * len + best;
    }
  }
  return y;
}

template <typename T>
Tensor<T> MaxPool1d<T>::Backward(const Tensor<T>& dy) {
  ExpectShape(dy.size() == argmax_.size(), "MaxPool1d backward", dy.shape);
  Tensor<T> dx(input_shape_);
  for (size_t i = 0; i < dy.size(); ++i) dx.data[argmax_[i]] += dy.data[i];
  return dx;
}

namespace {

size_t CellStart(size_t i, size_t n, size_t cells) { return i * n / cells; }
size_t CellEnd(size_t i, size_t n, size_t cells) { return ((i + 1) * n + cells - 1) / cells; }

}  // namespace

template <typename T>
Tensor<T> AdaptiveAvgPool2d<T>::Forward(const Tensor<T>& x) {
  ExpectShape(x.rank() == 4 && x.dim(2) >= out_h_ && x.dim(3) >= out_w_, "AdaptiveAvgPool2d",
              x.shape);
  input_shape_ = x.shape;
  const size_t planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  Tensor<T> y({x.dim(0), x.dim(1), out_h_, out_w_});
  for (size_t p = 0; p < planes; ++p) {
    const T* xp = x.ptr() + p * h * w;
    for (size_t i = 0; i < out_h_; ++i) {
      const size_t r0 = CellStart(i, h, out_h_), r1 = CellEnd(i, h, out_h_);
      for (size_t j = 0; j < out_w_; ++j) {
        const size_t c0 = CellStart(j, w, out_w_), c1 = CellEnd(j, w, out_w_);
        double acc = 0.0;
        for (size_t r = r0; r < r1; ++r) {
          for (size_t c = c0; c < c1; ++c) acc += xp[r * w + c];
        }
        y.data[(p * out_h_ + i) * out_w_ + j] = static_cast<T>(acc / ((r1 - r0) * (c1 - c0)));
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> AdaptiveAvgPool2d<T>::Backward(const Tensor<T>& dy) {
  const size_t planes = input_shape_[0] * input_shape_[1], h = input_shape_[2],
               w = input_shape_[3];
  ExpectShape(dy.size() == planes * out_h_ * out_w_, "AdaptiveAvgPool2d backward", dy.shape);
  Tensor<T> dx(input_shape_);
  for (size_t p = 0; p < planes; ++p) {
    T* dxp = dx.ptr() + p * h * w;
    for (size_t i = 0; i < out_h_; ++i) {
      const size_t r0 = CellStart(i, h, out_h_), r1 = CellEnd(i, h, out_h_);
      for (size_t j = 0; j < out_w_; ++j) {
        const size_t c0 = CellStart(j, w, out_w_), c1 = CellEnd(j, w, out_w_);
        const T g = static_cast<T>(dy.data[(p * out_h_ + i) * out_w_ + j] /
                                   static_cast<double>((r1 - r0) * (c1 - c0)));
        for (size_t r = r0; r < r1; ++r) {
          for (size_t c = c0; c < c1; ++c) dxp[r * w + c] += g;
        }
      }
    }
  }
  return dx;
}

// ---------------------------------------------------------------- linear

template <typename T>
Linear<T>::Linear(size_t in_features, size_t out_features)
    : weight({out_features, in_features}),
      bias({out_features}),
      weight_grad({out_features, in_features}),
      bias_grad({out_features}),
      in_(in_features),
      out_(out_features) {}

template <typename T>
void Linear<T>::Init(SplitMix64& rng) {
  UniformInit(weight, static_cast<double>(in_), rng);
  bias.Fill(T(0));
}

template <typename T>
std::vector<Param<T>> Linear<T>::Params() {
  return {{"weight", &weight, &weight_grad}, {"bias", &bias, &bias_grad}};
}

template <typename T>
Tensor<T> Linear<T>::Forward(const Tensor<T>& x) {
  ExpectShape(x.rank() >= 2 && x.stride0() == in_, "Linear", x.shape);
  input_ = x;
  const size_t batch = x.dim(0);
  Tensor<T> y({batch, out_});
  for (size_t b = 0; b < batch; ++b) {
    const T* xb = x.ptr() + b * in_;
    for (size_t o = 0; o < out_; ++o) {
      y.data[b * out_ + o] = bias.data[o] + Dot(weight.ptr() + o * in_, xb, in_);
    }
  }
  return y;
}

template <typename T>
Tensor<T> Linear<T>::Backward(const Tensor<T>& dy) {
  const size_t batch = input_.dim(0);
  ExpectShape(dy.shape == std::vector<size_t>{batch, out_}, "Linear backward", dy.shape);
  Tensor<T> dx(input_.shape);
  for (size_t b = 0; b < batch; ++b) {
    const T* xb = input_.ptr() + b * in_;
    T* dxb = dx.ptr() + b * in_;
    for (size_t o = 0; o < out_; ++o) {
      const T g = dy.data[b * out_ + o];
      bias_grad.data[o] += g;
      if (g == T(0)) continue;
      Axpy(g, xb, weight_grad.ptr() + o * in_, in_);
      Axpy(g, weight.ptr() + o * in_, dxb, in_);
    }
  }
  return dx;
}

// ---------------------------------------------------------------- loss

template <typename T>
T SoftmaxCrossEntropy<T>::Forward(const Tensor<T>& logits, std::span<const int> labels) {
  ExpectShape(logits.rank() == 2 && logits.dim(0) == labels.size() && logits.dim(0) > 0,
              "SoftmaxCrossEntropy", logits.shape);
  const size_t batch = logits.dim(0), classes = logits.dim(1);
  probs_ = Tensor<T>(logits.shape);
  labels_.assign(labels.begin(), labels.end());
  double loss = 0.0;
  for (size_t b = 0; b < batch; ++b) {
    if (labels[b] < 0 || static_cast<size_t>(labels[b]) >= classes) {
      throw Error(ErrorCode::kInvalidArgument, "label outside [0, classes)");
    }
    const T* z = logits.ptr() + b * classes;
    const double zmax = *std::max_element(z, z + classes);
    double denom = 0.0;
    for (size_t c = 0; c < classes; ++c) denom += std::exp(z[c] - zmax);
    for (size_t c = 0; c < classes; ++c) {
      probs_.data[b * classes + c] = static_cast<T>(std::exp(z[c] - zmax) / denom);
    }
    loss -= (z[labels[b]] - zmax) - std::log(denom);
  }
  return static_cast<T>(loss / batch);
}

template <typename T>
Tensor<T> SoftmaxCrossEntropy<T>::Backward() const {
  Tensor<T> d = probs_;
  const size_t batch = d.dim(0), classes = d.dim(1);
  for (size_t b = 0; b < batch; ++b) {
    d.data[b * classes + labels_[b]] -= T(1);
    for (size_t c = 0; c < classes; ++c) d.data[b * classes + c] /= static_cast<T>(batch);
  }
  return d;
}

// ---------------------------------------------------------------- sequential

template <typename T>
Layer<T>& Sequential<T>::Add(std::unique_ptr<Layer<T>> layer) {
  layers_.push_back(std::move(layer));
  return *layers_.back();
}

template <typename T>
Tensor<T> Sequential<T>::Forward(const Tensor<T>& x) {
  Tensor<T> h = x;
  for (auto& layer : layers_) h = layer->Forward(h);
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::Backward(const Tensor<T>& dy) {
  Tensor<T> g = dy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->Backward(g);
  return g;
}

template <typename T>
std::vector<Param<T>> Sequential<T>::Params() {
  std::vector<Param<T>> out;
  for (size_t i = 0; i < layers_.size(); ++i) {
    for (Param<T> p : layers_[i]->Params()) {
      p.name = prefix_ + std::to_string(i) + "." + p.name;
      out.push_back(p);
    }
  }
  return out;
}

template <typename T>
void Sequential<T>::Init(SplitMix64& rng) {
  for (auto& layer : layers_) layer->Init(rng);
}

#define SUPERVOICE_INSTANTIATE(T)                                                     \
  template std::vector<T> SincBandPassTaps<T>(double, double, size_t, double);       \
  template class SincConv1d<T>;                                                       \
  template class Conv1d<T>;                                                           \
  template class Conv2d<T>;                                                           \
  template class LayerNorm<T>;                                                        \
  template class LeakyRelu<T>;                                                        \
  template class MaxPool1d<T>;                                                        \
  template class AdaptiveAvgPool2d<T>;                                                \
  template class Linear<T>;                                                           \
  template class SoftmaxCrossEntropy<T>;                                              \
  template class Sequential<T>;

SUPERVOICE_INSTANTIATE(float)
SUPERVOICE_INSTANTIATE(double)

#undef SUPERVOICE_INSTANTIATE

}  // namespace supervoice
