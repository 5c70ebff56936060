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

#include "supervoice/synthcorpus.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "supervoice/errors.h"
#include "supervoice/fft.h"
#include "supervoice/parallel.h"
#include "supervoice/rng.h"

namespace supervoice {
namespace {

using GainFn = std::function<double(double)>;

// Enough zero padding that the ringing of the smooth filter edges used here
// (>= 100 Hz transitions) dies out before wrapping around.
constexpr size_t kFilterPad = 16384;

// Raised-cosine step from 0 at `lo` to 1 at `hi`.
double RaisedStep(double f, double lo, double hi) {
  if (f <= lo) return 0.0;
  if (f >= hi) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * (f - lo) / (hi - lo));
}

// Filters real signals a and b with real, even (zero-phase) gains ga and gb
// using one complex transform pair. b may be empty.
void FilterPair(std::vector<double>* a, const GainFn& ga, std::vector<double>* b,
                const GainFn& gb, int sample_rate) {
  const size_t n = a->size();
  const size_t size = NextPowerOfTwo(n + kFilterPad);
  const Fft fft(size);
  std::vector<std::complex<double>> z(size, {0.0, 0.0});
  const bool pair = b != nullptr && !b->empty();
  for (size_t i = 0; i < n; ++i) z[i] = {(*a)[i], pair ? (*b)[i] : 0.0};
  fft.Forward(z);
  const double df = static_cast<double>(sample_rate) / size;
  std::vector<std::complex<double>> y(size);
  for (size_t k = 0; k <= size / 2; ++k) {
    const size_t kc = (size - k) % size;
    const std::complex<double> zk = z[k];
    const std::complex<double> zc = std::conj(z[kc]);
    const std::complex<double> xa = 0.5 * (zk + zc);
    const std::complex<double> diff = zk - zc;
    const std::complex<double> xb(0.5 * diff.imag(), -0.5 * diff.real());
    const double f = k * df;
    const double g1 = ga(f);
    const double g2 = pair ? gb(f) : 0.0;
    // Recombine as G1 Xa + i G2 Xb; both halves stay Hermitian.
    const std::complex<double> ya = g1 * xa;
    const std::complex<double> yb = g2 * xb;
    y[k] = {ya.real() - yb.imag(), ya.imag() + yb.real()};
    if (kc != k) {
      const std::complex<double> ya_c = std::conj(ya);
      const std::complex<double> yb_c = std::conj(yb);
      y[kc] = {ya_c.real() - yb_c.imag(), ya_c.imag() + yb_c.real()};
    }
  }
  fft.Inverse(y);
  for (size_t i = 0; i < n; ++i) {
    (*a)[i] = y[i].real();
    if (pair) (*b)[i] = y[i].imag();
  }
}

// Adds a raised-cosine-edged plateau of height `level` on [start, end).
void AddSegment(std::vector<double>* env, double start, double end, double level,
                double ramp, int sample_rate) {
  const auto n = static_cast<double>(env->size());
  const size_t i0 = static_cast<size_t>(std::max(0.0, start * sample_rate));
  const size_t i1 = static_cast<size_t>(std::min(n, end * sample_rate));
  for (size_t i = i0; i < i1; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double g = std::min(RaisedStep(t, start, start + ramp),
                              1.0 - RaisedStep(t, end - ramp, end));
    (*env)[i] = std::max((*env)[i], level * g);
  }
}

double Rms(const std::vector<double>& x, const std::vector<double>& env) {
  double acc = 0.0, weight = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    acc += x[i] * x[i];
    weight += env[i] * env[i];
  }
  return weight > 0.0 ? std::sqrt(acc / weight) : 0.0;
}

// Formant envelope for voiced sound, confined to 60 Hz - 8 kHz.
double VoicedGain(double f, const std::vector<double>& formants) {
  if (f <= 0.0) return 0.0;
  double resonance = 0.0;
  for (double fc : formants) {
    const double bw = 80.0 + 0.06 * fc;
    const double x = (f - fc) / bw;
    resonance += 1.0 / (1.0 + x * x);
  }
  const double tilt = 1.0 / (1.0 + f / 800.0);
  return resonance * tilt * RaisedStep(f, 40.0, 90.0) * (1.0 - RaisedStep(f, 6500.0, 7800.0));
}

// Fricative colouring: rises from 2 kHz, fixed shape to 16 kHz, the
// talker's band gains (interpolated in dB) over 16-48 kHz, gone by 52 kHz.
double FricativeGain(double f, const std::vector<double>& band_db) {
  constexpr double kBandWidth =
      (SpeakerProfile::kHfHigh - SpeakerProfile::kHfLow) / SpeakerProfile::kHfBands;
  if (f < 2000.0 || f > 52000.0) return 0.0;
  double db = 0.0;
  if (f < SpeakerProfile::kHfLow) {
    db = -12.0 + 12.0 * (f - 4000.0) / (SpeakerProfile::kHfLow - 4000.0);
    db = std::min(0.0, db);
  }
  const double first_center = SpeakerProfile::kHfLow + kBandWidth / 2;
  const double pos = (f - first_center) / kBandWidth;
  double band = 0.0;
  if (pos <= 0.0) {
    band = band_db.front();
  } else if (pos >= static_cast<double>(band_db.size() - 1)) {
    band = band_db.back();
  } else {
    const size_t i = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    band = band_db[i] * (1.0 - frac) + band_db[i + 1] * frac;
  }
  // Talker gains fade in over 12-16 kHz.
  db += band * RaisedStep(f, 12000.0, SpeakerProfile::kHfLow);
  // Natural decay of fricative energy across the ultrasonic range.
  if (f > SpeakerProfile::kHfLow) db -= 6.0 * (f - SpeakerProfile::kHfLow) / 32000.0;
  const double gain = std::pow(10.0, db / 20.0);
  return gain * RaisedStep(f, 2000.0, 4000.0) * (1.0 - RaisedStep(f, 48000.0, 52000.0));
}

}  // namespace

SpeakerProfile SpeakerProfile::FromSeed(uint64_t seed) {
  SplitMix64 rng(seed);
  SpeakerProfile p;
  p.seed = seed;
  p.pitch = rng.Uniform(85.0, 255.0);
  // Shorter vocal tracts (higher pitch) tend to raise all formants.
  const double tract = 0.9 + 0.25 * (p.pitch - 85.0) / 170.0 + rng.Uniform(-0.05, 0.05);
  p.formant_centers = {tract * rng.Uniform(350.0, 750.0), tract * rng.Uniform(1000.0, 2000.0),
                       tract * rng.Uniform(2300.0, 3000.0), tract * rng.Uniform(3300.0, 4200.0)};
  p.hf_envelope.resize(kHfBands);
  for (double& g : p.hf_envelope) g = std::pow(10.0, rng.Uniform(-9.0, 3.0) / 20.0);
  p.fricative_rate = rng.Uniform(2.0, 3.5);
  return p;
}

AudioBuffer GenerateGenuine(const SpeakerProfile& profile, double duration_seconds,
                            int sample_rate, uint64_t utterance_seed) {
  if (profile.hf_envelope.size() != SpeakerProfile::kHfBands) {
    throw Error(ErrorCode::kInvalidArgument, "hf_envelope must hold 8 band gains");
  }
  SplitMix64 rng(utterance_seed);
  const size_t n = static_cast<size_t>(std::llround(duration_seconds * sample_rate));
  AudioBuffer out;
  out.sample_rate = sample_rate;
  out.samples.assign(n, 0.0f);
  if (n == 0) return out;

  // Per-take variation around the talker's identity.
  const double pitch = profile.pitch * (1.0 + 0.03 * rng.Gaussian());
  std::vector<double> formants = profile.formant_centers;
  for (double& f : formants) f *= 1.0 + 0.015 * rng.Gaussian();
  std::vector<double> band_db(SpeakerProfile::kHfBands);
  for (size_t i = 0; i < band_db.size(); ++i) {
    band_db[i] = 20.0 * std::log10(profile.hf_envelope[i]) + 0.4 * rng.Gaussian();
  }
  const double fricative_db = -4.0 + 1.0 * rng.Gaussian();

  // Timeline: [voiced][voiced fricative, voicing at 35%][gap] ...
  std::vector<double> voiced_env(n, 0.0), fric_env(n, 0.0), pitch_scale(n, 1.0);
  constexpr double kRamp = 0.008;
  const double mean_syllable = 0.19 + 0.08 + 0.07;
  const double burst_probability = std::min(1.0, profile.fricative_rate * mean_syllable);
  double t = rng.Uniform(0.02, 0.08);
  while (t < duration_seconds - 0.1) {
    const double voiced_len = rng.Uniform(0.12, 0.26);
    const double syllable_pitch = 1.0 + 0.05 * rng.Gaussian();
    double end = std::min(duration_seconds, t + voiced_len);
    AddSegment(&voiced_env, t, end, 1.0, kRamp, sample_rate);
    if (rng.Uniform() < burst_probability) {
      const double fric_len = rng.Uniform(0.06, 0.10);
      const double fric_end = std::min(duration_seconds, end - kRamp + fric_len);
      AddSegment(&fric_env, end - kRamp, fric_end, 1.0, kRamp, sample_rate);
      AddSegment(&voiced_env, end - 2 * kRamp, fric_end, 0.35, kRamp, sample_rate);
      end = fric_end;
    }
    const size_t i0 = static_cast<size_t>(t * sample_rate);
    const size_t i1 = std::min(n, static_cast<size_t>(end * sample_rate));
    for (size_t i = i0; i < i1; ++i) pitch_scale[i] = syllable_pitch;
    t = end + rng.Uniform(0.04, 0.10);
  }

  // Glottal pulse train with slow vibrato.
  std::vector<double> voiced(n, 0.0);
  const double vibrato_rate = rng.Uniform(0.5, 1.2);
  const double vibrato_phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  double phase = rng.Uniform();
  for (size_t i = 0; i < n; ++i) {
    const double time = static_cast<double>(i) / sample_rate;
    const double f0 = pitch * pitch_scale[i] *
                      (1.0 + 0.04 * std::sin(2.0 * std::numbers::pi * vibrato_rate * time + vibrato_phase));
    phase += f0 / sample_rate;
    if (phase >= 1.0) {
      phase -= 1.0;
      voiced[i] = 1.0;
    }
  }
  std::vector<double> fric(n);
  for (double& v : fric) v = rng.Gaussian();

  FilterPair(&voiced, [&](double f) { return VoicedGain(f, formants); }, &fric,
             [&](double f) { return FricativeGain(f, band_db); }, sample_rate);

  for (size_t i = 0; i < n; ++i) {
    voiced[i] *= voiced_env[i];
    fric[i] *= fric_env[i];
  }
  const double voiced_rms = Rms(voiced, voiced_env);
  const double fric_rms = Rms(fric, fric_env);
  const double fric_gain =
      fric_rms > 0.0 ? std::pow(10.0, fricative_db / 20.0) / fric_rms : 0.0;
  const double voiced_gain = voiced_rms > 0.0 ? 1.0 / voiced_rms : 0.0;

  std::vector<double> mix(n);
  double peak = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mix[i] = voiced_gain * voiced[i] + fric_gain * fric[i];
    peak = std::max(peak, std::abs(mix[i]));
  }
  if (peak == 0.0) peak = 1.0;
  const double level = 0.5 * std::pow(10.0, 0.05 * rng.Gaussian());
  // Microphone self-noise, 80 dB under the peak.
  const double noise = level * 1e-4;
  for (size_t i = 0; i < n; ++i) {
    out.samples[i] = static_cast<float>(level * mix[i] / peak + noise * rng.Gaussian());
  }
  return out;
}

const char* DeviceKindName(DeviceKind kind) {
  return kind == DeviceKind::kCommercialReplay ? kKindCommercial : kKindUltrasonic;
}

AudioBuffer ApplyDevice(const AudioBuffer& genuine, const DeviceModel& device) {
  if (!(device.cutoff > 0.0)) throw Error(ErrorCode::kInvalidArgument, "device cutoff must be positive");
  std::vector<double> x(genuine.samples.begin(), genuine.samples.end());
  const double fc = device.cutoff;
  GainFn gain;
  if (device.kind == DeviceKind::kCommercialReplay) {
    gain = [fc](double f) { return 1.0 - RaisedStep(f, 0.9 * fc, fc); };
  } else {
    gain = [fc](double f) { return RaisedStep(f, fc, 2.0 * fc); };
  }
  if (!x.empty()) FilterPair(&x, gain, nullptr, gain, genuine.sample_rate);
  AudioBuffer out;
  out.sample_rate = genuine.sample_rate;
  out.samples.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) out.samples[i] = static_cast<float>(x[i]);
  return out;
}

std::string SpeakerName(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "spk%02zu", index);
  return buf;
}

void GenerateCorpusInMemory(
    const CorpusOptions& options,
    const std::function<void(const ManifestRow&, const AudioBuffer&)>& sink) {
  if (options.n_speakers < 2) {
    throw Error(ErrorCode::kInvalidArgument, "a corpus needs at least two speakers");
  }
  const size_t total = options.n_speakers * options.utt_per_speaker;
  struct Take {
    std::vector<ManifestRow> rows;
    std::vector<AudioBuffer> audio;
  };
  // Bounded batches keep memory flat while preserving manifest order.
  const size_t batch = std::max<size_t>(1, options.jobs) * 4;
  for (size_t start = 0; start < total; start += batch) {
    const size_t count = std::min(batch, total - start);
    std::vector<Take> takes(count);
    ParallelFor(count, options.jobs, [&](size_t j) {
      const size_t index = start + j;
      const size_t spk = index / options.utt_per_speaker;
      const size_t utt = index % options.utt_per_speaker;
      const SpeakerProfile profile = SpeakerProfile::FromSeed(DeriveSeed(options.seed, spk));
      const uint64_t utt_seed = DeriveSeed(profile.seed, 1000 + utt);
      SplitMix64 device_rng(DeriveSeed(utt_seed, 77));
      const AudioBuffer genuine =
          GenerateGenuine(profile, options.duration_seconds, options.sample_rate, utt_seed);
      const DeviceModel commercial{DeviceKind::kCommercialReplay, device_rng.Uniform(16000.0, 24000.0)};
      const DeviceModel ultrasonic{DeviceKind::kUltrasonicReplay, device_rng.Uniform(1000.0, 2000.0)};
      const std::string speaker = SpeakerName(spk);
      char stem[64];
      std::snprintf(stem, sizeof(stem), "%s/utt%02zu", speaker.c_str(), utt);
      Take& take = takes[j];
      take.rows = {{std::string(stem) + "_genuine.wav", speaker, kKindGenuine},
                   {std::string(stem) + "_commercial.wav", speaker, kKindCommercial},
                   {std::string(stem) + "_ultrasonic.wav", speaker, kKindUltrasonic}};
      take.audio = {genuine, ApplyDevice(genuine, commercial), ApplyDevice(genuine, ultrasonic)};
    });
    for (const Take& take : takes) {
      for (size_t k = 0; k < take.rows.size(); ++k) sink(take.rows[k], take.audio[k]);
    }
  }
}

std::vector<ManifestRow> GenerateCorpus(const CorpusOptions& options,
                                        const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + out_dir.string());
  std::vector<ManifestRow> rows;
  GenerateCorpusInMemory(options, [&](const ManifestRow& row, const AudioBuffer& audio) {
    const std::filesystem::path file = out_dir / row.path;
    std::filesystem::create_directories(file.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + file.parent_path().string());
    WriteWav(audio, file, SampleFormat::kFloat32);
    rows.push_back(row);
  });
  WriteManifest(rows, out_dir / "manifest.tsv");
  return rows;
}

void WriteManifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  out << "path\tspeaker\tkind\n";
  for (const ManifestRow& r : rows) out << r.path << '\t' << r.speaker << '\t' << r.kind << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

std::vector<ManifestRow> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  std::string line;
  if (!std::getline(in, line) || line != "path\tspeaker\tkind") {
    throw Error(ErrorCode::kCorruptFile, path.string() + ": expected header 'path\\tspeaker\\tkind'");
  }
  std::vector<ManifestRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    ManifestRow r;
    if (!std::getline(fields, r.path, '\t') || !std::getline(fields, r.speaker, '\t') ||
        !std::getline(fields, r.kind)) {
      throw Error(ErrorCode::kCorruptFile, path.string() + ": bad row '" + line + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace supervoice
