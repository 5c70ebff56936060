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

#ifndef SUPERVOICE_SYNTHCORPUS_H_
#define SUPERVOICE_SYNTHCORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "supervoice/audio_io.h"

namespace supervoice {

// Synthetic talker. hf_envelope holds linear gains for eight 4 kHz bands
// covering 16-48 kHz, the part of the spectrum that carries the talker's
// ultrasonic signature.
struct SpeakerProfile {
  static constexpr size_t kHfBands = 8;
  static constexpr double kHfLow = 16000.0;
  static constexpr double kHfHigh = 48000.0;

  double pitch = 120.0;                // Hz, in [80, 300]
  std::vector<double> formant_centers; // Hz, ascending
  std::vector<double> hf_envelope;     // kHfBands positive gains
  double fricative_rate = 2.5;         // bursts per second
  uint64_t seed = 0;

  static SpeakerProfile FromSeed(uint64_t seed);
};

// Harmonic voiced segments shaped by the formants (all below 8 kHz), voiced
// fricative bursts whose noise is coloured by hf_envelope up to 48 kHz,
// silence gaps, and a faint broadband microphone floor. `utterance_seed`
// varies content and prosody; the profile fixes identity.
AudioBuffer GenerateGenuine(const SpeakerProfile& profile, double duration_seconds,
                            int sample_rate, uint64_t utterance_seed);

enum class DeviceKind { kCommercialReplay, kUltrasonicReplay };

const char* DeviceKindName(DeviceKind kind);

struct DeviceModel {
  DeviceKind kind = DeviceKind::kCommercialReplay;
  double cutoff = 20000.0;  // Hz
};

// Zero-phase FFT-domain filtering. CommercialReplay: unity below 0.9*cutoff,
// raised-cosine roll-off, zero from the cutoff up. UltrasonicReplay: zero
// below the cutoff, raised-cosine rise to unity at 2*cutoff.
AudioBuffer ApplyDevice(const AudioBuffer& genuine, const DeviceModel& device);

struct ManifestRow {
  std::string path;  // relative to the manifest's directory
  std::string speaker;
  std::string kind;  // "genuine", "commercial_replay", "ultrasonic_replay"
};

constexpr const char* kKindGenuine = "genuine";
constexpr const char* kKindCommercial = "commercial_replay";
constexpr const char* kKindUltrasonic = "ultrasonic_replay";

struct CorpusOptions {
  size_t n_speakers = 8;
  size_t utt_per_speaker = 10;
  uint64_t seed = 7;
  double duration_seconds = 2.0;
  int sample_rate = 192000;
  size_t jobs = 1;
};

std::string SpeakerName(size_t index);

// Deterministic corpus: per utterance a genuine take plus its commercial
// (cutoff 16-24 kHz) and ultrasonic (cutoff 1-2 kHz) replays, written as
// float-32 WAV under out_dir/spkNN/, and manifest.tsv with header
// "path\tspeaker\tkind". Throws Error(kIoFailure).
std::vector<ManifestRow> GenerateCorpus(const CorpusOptions& options,
                                        const std::filesystem::path& out_dir);

// In-memory variant used by tests: calls sink(row, audio) in manifest order.
void GenerateCorpusInMemory(
    const CorpusOptions& options,
    const std::function<void(const ManifestRow&, const AudioBuffer&)>& sink);

void WriteManifest(const std::vector<ManifestRow>& rows, const std::filesystem::path& path);
// Paths are returned as written; resolve them against the manifest directory.
std::vector<ManifestRow> ReadManifest(const std::filesystem::path& path);

}  // namespace supervoice

#endif  // SUPERVOICE_SYNTHCORPUS_H_
