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

#ifndef SUPERVOICE_PIPELINE_H_
#define SUPERVOICE_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "supervoice/audio_io.h"
#include "supervoice/liveness.h"
#include "supervoice/neural/model.h"
#include "supervoice/neural/trainer.h"
#include "supervoice/preprocess.h"
#include "supervoice/spectrum.h"

namespace supervoice {

// Pairs a 16 kHz waveform window with the STFT columns covering the same
// stretch of the 192 kHz recording. One low-rate sample spans
// alpha / stft_hop columns.
struct AlignConfig {
  size_t l_win = 3200;
  size_t l_hop = 160;
  size_t alpha = 12;
  size_t stft_hop = 512;

  // l_win * alpha / stft_hop; must divide exactly.
  size_t HWin() const;
  // l_hop * alpha / stft_hop before rounding (3.75 for the defaults).
  double ExactHHop() const;
  // Nearest integer to ExactHHop(); the nominal column step.
  size_t HHop() const;
  // First column of pair k, rounded from the exact offset k * ExactHHop()
  // so rounding error never accumulates across pairs.
  size_t ColumnStart(size_t k) const;
  void Validate() const;
};

struct WindowPair {
  size_t low_begin = 0;
  size_t low_end = 0;
  size_t col_begin = 0;
  size_t col_end = 0;
};

// Pairs k = 0, 1, ... while both ranges fit. Throws Error(kInputTooShort)
// when num_low_samples < l_win or not even one pair fits.
std::vector<WindowPair> AlignWindows(size_t num_low_samples, size_t num_hf_columns,
                                     const AlignConfig& config);

struct PipelineConfig {
  AlignConfig align;
  ResampleSpec resample;
  double hf_low = 8000.0;
  double hf_high = 48000.0;
  SilenceParams silence = SilenceParams::ForRate(192000);
  bool remove_silence = true;
  LivenessConfig liveness;
  // Windows per network pass; affects memory only.
  size_t micro_batch = 8;
};

// Both model inputs for one utterance.
struct UtteranceFeatures {
  std::vector<float> low;   // 16 kHz waveform
  Spectrogram high;         // dB crop of the 192 kHz STFT, hf_low..hf_high
  std::vector<WindowPair> windows;
};

// `buffer` must be at the pipeline rate and already silence-trimmed.
// Throws Error(kInvalidArgument) or Error(kInputTooShort).
UtteranceFeatures ExtractFeatures(const AudioBuffer& buffer, const PipelineConfig& config);

TrainingWindow MakeWindow(const UtteranceFeatures& features, const WindowPair& pair, int label);

// One embedding per aligned window pair.
std::vector<std::vector<float>> WindowEmbeddings(const UtteranceFeatures& features,
                                                 SpeakerModel<float>& model,
                                                 const PipelineConfig& config);

// Mean of the window embeddings of a silence-trimmed utterance.
std::vector<float> UtteranceEmbedding(const AudioBuffer& buffer, SpeakerModel<float>& model,
                                      const PipelineConfig& config);

// a.b / (|a| |b|); 0 when either vector is all zeros.
// Throws Error(kLengthMismatch).
double CosineSimilarity(std::span<const float> a, std::span<const float> b);

struct VerifyDecision {
  double similarity = 0.0;
  double gamma = 0.0;
  bool accepted = false;
};

// Mean cosine of `embedding` against every enrolled embedding; accepted iff
// the mean reaches gamma. Throws Error(kEmptyList).
VerifyDecision Decide(std::span<const float> embedding,
                      const std::vector<std::vector<float>>& enrolled, double gamma);

// Speaker embeddings bound to the checkpoint that produced them. Readers
// share a lock; Add and Load take it exclusively.
class EnrollmentStore {
 public:
  static constexpr uint32_t kVersion = 1;

  EnrollmentStore(std::string checkpoint_hash, size_t embedding_dim);

  EnrollmentStore(const EnrollmentStore&) = delete;
  EnrollmentStore& operator=(const EnrollmentStore&) = delete;

  const std::string& checkpoint_hash() const { return hash_; }
  size_t embedding_dim() const { return dim_; }

  // Throws Error(kHashMismatch) or Error(kLengthMismatch).
  void Add(const std::string& speaker, std::vector<std::vector<float>> embeddings,
           const std::string& producer_hash);

  bool Contains(const std::string& speaker) const;
  // Throws Error(kUnknownSpeaker).
  std::vector<std::vector<float>> Embeddings(const std::string& speaker) const;
  std::vector<std::string> Speakers() const;

  // "SVSTORE\0", u32 version, u32 dim, u32 len + hash bytes, u32 speakers,
  // then per speaker u32 len + UTF-8 id, u32 count, count x dim f32 (LE).
  void Save(const std::filesystem::path& path) const;
  // Throws Error(kNotFound), Error(kVersionMismatch) or Error(kCorruptFile).
  static std::unique_ptr<EnrollmentStore> Load(const std::filesystem::path& path);

 private:
  std::string hash_;
  size_t dim_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::vector<std::vector<float>>> records_;
};

// A loaded checkpoint and its digest.
struct EmbeddingModel {
  std::unique_ptr<SpeakerModel<float>> model;
  std::string hash;

  static EmbeddingModel Load(const std::filesystem::path& checkpoint);
  static EmbeddingModel Wrap(std::unique_ptr<SpeakerModel<float>> model);
};

// Silence trim (when enabled) followed by the liveness gate.
struct GatedUtterance {
  AudioBuffer trimmed;
  LivenessReport liveness;
};
GatedUtterance Preprocess(const AudioBuffer& buffer, const PipelineConfig& config);

// Every utterance must pass the liveness gate before any is enrolled.
// Returns the number of embeddings appended. Throws Error(kHashMismatch) or
// Error(kLivenessRejected).
size_t Enroll(const std::string& speaker, std::span<const AudioBuffer> utterances,
              EmbeddingModel& model, EnrollmentStore& store, const PipelineConfig& config);

struct VerifyOutcome {
  LivenessReport liveness;
  VerifyDecision decision;
};

// Liveness gate first; a spoof verdict throws Error(kSpoofDetected) without
// running the network. Throws Error(kUnknownSpeaker) or Error(kHashMismatch).
VerifyOutcome Verify(const AudioBuffer& utterance, const std::string& speaker,
                     const EnrollmentStore& store, EmbeddingModel& model, double gamma,
                     const PipelineConfig& config);

struct TrainingOptions {
  size_t epochs = 10;
  size_t batch = 128;
  double lr = 0.001;
  uint64_t seed = 1;
  // Window pairs drawn per utterance per epoch.
  size_t windows_per_utterance = 4;
};

struct EpochStats {
  size_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

// Speaker-classification training over pre-extracted utterances; labels
// index speakers. Deterministic in options.seed. `on_epoch` may be empty.
std::vector<EpochStats> TrainSpeakerModel(SpeakerModel<float>& model,
                                          const std::vector<UtteranceFeatures>& utterances,
                                          const std::vector<int>& labels, size_t classes,
                                          const TrainingOptions& options,
                                          const PipelineConfig& config,
                                          const std::function<void(const EpochStats&)>& on_epoch);

}  // namespace supervoice

#endif  // SUPERVOICE_PIPELINE_H_
