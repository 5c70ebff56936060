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

#include "supervoice/pipeline.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <mutex>

#include "supervoice/errors.h"
#include "supervoice/neural/checkpoint.h"
#include "supervoice/rng.h"

namespace supervoice {

// ---------------------------------------------------------------- alignment

void AlignConfig::Validate() const {
  if (l_win == 0 || l_hop == 0 || alpha == 0 || stft_hop == 0) {
    throw Error(ErrorCode::kInvalidArgument, "alignment sizes must be positive");
  }
  if ((l_win * alpha) % stft_hop != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "l_win * alpha must be a whole number of STFT hops");
  }
}

size_t AlignConfig::HWin() const {
  Validate();
  return l_win * alpha / stft_hop;
}

double AlignConfig::ExactHHop() const {
  return static_cast<double>(l_hop * alpha) / static_cast<double>(stft_hop);
}

size_t AlignConfig::HHop() const { return static_cast<size_t>(std::llround(ExactHHop())); }

size_t AlignConfig::ColumnStart(size_t k) const {
  return static_cast<size_t>(std::llround(static_cast<double>(k) * ExactHHop()));
}

std::vector<WindowPair> AlignWindows(size_t num_low_samples, size_t num_hf_columns,
                                     const AlignConfig& config) {
  const size_t h_win = config.HWin();
  if (num_low_samples < config.l_win) {
    throw Error(ErrorCode::kInputTooShort, "utterance shorter than one " +
                                               std::to_string(config.l_win) + "-sample window");
  }
  std::vector<WindowPair> pairs;
  for (size_t k = 0;; ++k) {
    const size_t low_begin = k * config.l_hop;
    const size_t col_begin = config.ColumnStart(k);
    if (low_begin + config.l_win > num_low_samples || col_begin + h_win > num_hf_columns) break;
    pairs.push_back({low_begin, low_begin + config.l_win, col_begin, col_begin + h_win});
  }
  if (pairs.empty()) {
    throw Error(ErrorCode::kInputTooShort, "fewer than " + std::to_string(h_win) +
                                               " spectrogram columns for one window");
  }
  return pairs;
}

// ---------------------------------------------------------------- features

UtteranceFeatures ExtractFeatures(const AudioBuffer& buffer, const PipelineConfig& config) {
  if (buffer.sample_rate != config.resample.source_rate) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(config.resample.source_rate) + " Hz audio, got " +
                    std::to_string(buffer.sample_rate));
  }
  StftConfig stft = StftConfig::Canonical();
  stft.hop = config.align.stft_hop;
  if (buffer.size() < stft.win_len) {
    throw Error(ErrorCode::kInputTooShort, "utterance shorter than one STFT frame");
  }
  UtteranceFeatures f;
  f.low = Downsample(buffer, config.resample).samples;
  f.high = CropBand(Stft(buffer, stft), config.hf_low, config.hf_high);
  f.windows = AlignWindows(f.low.size(), f.high.cols, config.align);
  return f;
}

TrainingWindow MakeWindow(const UtteranceFeatures& features, const WindowPair& pair, int label) {
  TrainingWindow w;
  w.label = label;
  w.low.assign(features.low.begin() + pair.low_begin, features.low.begin() + pair.low_end);
  const size_t rows = features.high.rows, cols = features.high.cols;
  const size_t width = pair.col_end - pair.col_begin;
  if (pair.low_end > features.low.size() || pair.col_end > cols) {
    throw Error(ErrorCode::kInvalidArgument, "window pair outside the utterance");
  }
  w.high.resize(rows * width);
  for (size_t r = 0; r < rows; ++r) {
    const float* src = features.high.values.data() + r * cols + pair.col_begin;
    std::copy(src, src + width, w.high.begin() + r * width);
  }
  return w;
}

std::vector<std::vector<float>> WindowEmbeddings(const UtteranceFeatures& features,
                                                 SpeakerModel<float>& model,
                                                 const PipelineConfig& config) {
  const ModelConfig& mc = model.config();
  const size_t step = std::max<size_t>(1, config.micro_batch);
  const size_t plane = mc.hf_rows * mc.hf_cols;
  std::vector<std::vector<float>> out;
  out.reserve(features.windows.size());
  for (size_t begin = 0; begin < features.windows.size(); begin += step) {
    const size_t end = std::min(features.windows.size(), begin + step);
    const size_t n = end - begin;
    Tensor<float> low({n, mc.window});
    Tensor<float> high({n, 1, mc.hf_rows, mc.hf_cols});
    for (size_t i = 0; i < n; ++i) {
      const TrainingWindow w = MakeWindow(features, features.windows[begin + i], 0);
      if (w.low.size() != mc.window) {
        throw Error(ErrorCode::kWindowLengthMismatch, "alignment window differs from model window");
      }
      if (w.high.size() != plane) {
        throw Error(ErrorCode::kShapeMismatch, "spectrogram crop differs from the model input");
      }
      std::copy(w.low.begin(), w.low.end(), low.ptr() + i * mc.window);
      std::copy(w.high.begin(), w.high.end(), high.ptr() + i * plane);
    }
    const Tensor<float> emb = model.Forward(low, high);
    for (size_t i = 0; i < n; ++i) {
      out.emplace_back(emb.ptr() + i * mc.embedding, emb.ptr() + (i + 1) * mc.embedding);
    }
  }
  return out;
}

std::vector<float> UtteranceEmbedding(const AudioBuffer& buffer, SpeakerModel<float>& model,
                                      const PipelineConfig& config) {
  const std::vector<std::vector<float>> windows =
      WindowEmbeddings(ExtractFeatures(buffer, config), model, config);
  std::vector<double> acc(model.config().embedding, 0.0);
  for (const auto& e : windows) {
    for (size_t j = 0; j < acc.size(); ++j) acc[j] += e[j];
  }
  std::vector<float> mean(acc.size());
  for (size_t j = 0; j < acc.size(); ++j) mean[j] = static_cast<float>(acc[j] / windows.size());
  return mean;
}

// ---------------------------------------------------------------- decision

double CosineSimilarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "cosine of vectors with different lengths");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

VerifyDecision Decide(std::span<const float> embedding,
                      const std::vector<std::vector<float>>& enrolled, double gamma) {
  if (enrolled.empty()) throw Error(ErrorCode::kEmptyList, "no enrolled embeddings");
  double sum = 0.0;
  for (const auto& e : enrolled) sum += CosineSimilarity(e, embedding);
  VerifyDecision d;
  d.similarity = sum / enrolled.size();
  d.gamma = gamma;
  d.accepted = d.similarity >= gamma;
  return d;
}

// ---------------------------------------------------------------- store

namespace {

constexpr char kStoreMagic[8] = {'S', 'V', 'S', 'T', 'O', 'R', 'E', '\0'};

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutString(std::string& out, const std::string& s) {
  PutU32(out, static_cast<uint32_t>(s.size()));
  out += s;
}

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}

  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kCorruptFile, "enrollment store truncated");
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::string Bytes(size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string String() { return Bytes(U32()); }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  size_t pos_ = 0;
};

}  // namespace

EnrollmentStore::EnrollmentStore(std::string checkpoint_hash, size_t embedding_dim)
    : hash_(std::move(checkpoint_hash)), dim_(embedding_dim) {}

void EnrollmentStore::Add(const std::string& speaker, std::vector<std::vector<float>> embeddings,
                          const std::string& producer_hash) {
  if (producer_hash != hash_) {
    throw Error(ErrorCode::kHashMismatch, "store is bound to checkpoint " + hash_ +
                                              ", embeddings come from " + producer_hash);
  }
  for (const auto& e : embeddings) {
    if (e.size() != dim_) {
      throw Error(ErrorCode::kLengthMismatch, "embedding of length " + std::to_string(e.size()) +
                                                  ", store holds " + std::to_string(dim_));
    }
  }
  std::unique_lock lock(mu_);
  auto& list = records_[speaker];
  for (auto& e : embeddings) list.push_back(std::move(e));
}

bool EnrollmentStore::Contains(const std::string& speaker) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(speaker);
  return it != records_.end() && !it->second.empty();
}

std::vector<std::vector<float>> EnrollmentStore::Embeddings(const std::string& speaker) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(speaker);
  if (it == records_.end() || it->second.empty()) {
    throw Error(ErrorCode::kUnknownSpeaker, "speaker '" + speaker + "' is not enrolled");
  }
  return it->second;
}

std::vector<std::string> EnrollmentStore::Speakers() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, list] : records_) out.push_back(id);
  return out;
}

void EnrollmentStore::Save(const std::filesystem::path& path) const {
  std::string out(kStoreMagic, sizeof(kStoreMagic));
  {
    std::shared_lock lock(mu_);
    PutU32(out, kVersion);
    PutU32(out, static_cast<uint32_t>(dim_));
    PutString(out, hash_);
    PutU32(out, static_cast<uint32_t>(records_.size()));
    for (const auto& [id, list] : records_) {
      PutString(out, id);
      PutU32(out, static_cast<uint32_t>(list.size()));
      for (const auto& e : list) {
        for (float v : e) PutU32(out, std::bit_cast<uint32_t>(v));
      }
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot write enrollment store " + path.string());
}

std::unique_ptr<EnrollmentStore> EnrollmentStore::Load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kNotFound, "cannot open enrollment store " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  ByteReader r(bytes);
  if (r.Bytes(sizeof(kStoreMagic)) != std::string(kStoreMagic, sizeof(kStoreMagic))) {
    throw Error(ErrorCode::kCorruptFile, "not an enrollment store");
  }
  const uint32_t version = r.U32();
  if (version != kVersion) {
    throw Error(ErrorCode::kVersionMismatch, "enrollment store version " + std::to_string(version));
  }
  const uint32_t dim = r.U32();
  auto store = std::make_unique<EnrollmentStore>(r.String(), dim);
  const uint32_t speakers = r.U32();
  for (uint32_t s = 0; s < speakers; ++s) {
    const std::string id = r.String();
    const uint32_t count = r.U32();
    r.Need(static_cast<size_t>(count) * dim * 4);
    auto& list = store->records_[id];
    for (uint32_t i = 0; i < count; ++i) {
      std::vector<float> e(dim);
      for (float& v : e) v = std::bit_cast<float>(r.U32());
      list.push_back(std::move(e));
    }
  }
  if (!r.AtEnd()) throw Error(ErrorCode::kCorruptFile, "trailing bytes in enrollment store");
  return store;
}

// ---------------------------------------------------------------- enroll / verify

EmbeddingModel EmbeddingModel::Load(const std::filesystem::path& checkpoint) {
  return Wrap(LoadCheckpoint(checkpoint));
}

EmbeddingModel EmbeddingModel::Wrap(std::unique_ptr<SpeakerModel<float>> model) {
  EmbeddingModel m;
  m.hash = CheckpointHash(*model);
  m.model = std::move(model);
  return m;
}

GatedUtterance Preprocess(const AudioBuffer& buffer, const PipelineConfig& config) {
  if (buffer.sample_rate != config.resample.source_rate) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected " + std::to_string(config.resample.source_rate) + " Hz audio, got " +
                    std::to_string(buffer.sample_rate));
  }
  GatedUtterance g;
  g.trimmed = config.remove_silence ? RemoveSilence(buffer, config.silence) : buffer;
  g.liveness = AssessLiveness(g.trimmed, config.liveness);
  return g;
}

size_t Enroll(const std::string& speaker, std::span<const AudioBuffer> utterances,
              EmbeddingModel& model, EnrollmentStore& store, const PipelineConfig& config) {
  if (model.hash != store.checkpoint_hash()) {
    throw Error(ErrorCode::kHashMismatch, "store was built with a different checkpoint");
  }
  std::vector<AudioBuffer> trimmed;
  for (size_t i = 0; i < utterances.size(); ++i) {
    GatedUtterance g = Preprocess(utterances[i], config);
    if (g.liveness.verdict != Verdict::kLive) {
      throw Error(ErrorCode::kLivenessRejected,
                  "enrollment utterance " + std::to_string(i) + " failed the liveness gate");
    }
    trimmed.push_back(std::move(g.trimmed));
  }
  std::vector<std::vector<float>> embeddings;
  for (const AudioBuffer& b : trimmed) {
    embeddings.push_back(UtteranceEmbedding(b, *model.model, config));
  }
  const size_t n = embeddings.size();
  store.Add(speaker, std::move(embeddings), model.hash);
  return n;
}

VerifyOutcome Verify(const AudioBuffer& utterance, const std::string& speaker,
                     const EnrollmentStore& store, EmbeddingModel& model, double gamma,
                     const PipelineConfig& config) {
  if (model.hash != store.checkpoint_hash()) {
    throw Error(ErrorCode::kHashMismatch, "store was built with a different checkpoint");
  }
  const std::vector<std::vector<float>> enrolled = store.Embeddings(speaker);
  GatedUtterance g = Preprocess(utterance, config);
  VerifyOutcome out;
  out.liveness = g.liveness;
  if (g.liveness.verdict != Verdict::kLive) {
    throw Error(ErrorCode::kSpoofDetected, "liveness gate fired");
  }
  out.decision = Decide(UtteranceEmbedding(g.trimmed, *model.model, config), enrolled, gamma);
  return out;
}

// ---------------------------------------------------------------- training

std::vector<EpochStats> TrainSpeakerModel(SpeakerModel<float>& model,
                                          const std::vector<UtteranceFeatures>& utterances,
                                          const std::vector<int>& labels, size_t classes,
                                          const TrainingOptions& options,
                                          const PipelineConfig& config,
                                          const std::function<void(const EpochStats&)>& on_epoch) {
  if (utterances.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "utterances and labels differ in length");
  }
  if (utterances.empty()) throw Error(ErrorCode::kEmptyInput, "no training utterances");
  TrainerOptions trainer_options;
  trainer_options.rmsprop.lr = options.lr;
  trainer_options.micro_batch = config.micro_batch;
  trainer_options.head_seed = DeriveSeed(options.seed, 0x4EAD);
  Trainer<float> trainer(model, classes, trainer_options);
  const size_t batch = std::max<size_t>(1, options.batch);

  std::vector<EpochStats> history;
  for (size_t epoch = 0; epoch < options.epochs; ++epoch) {
    SplitMix64 rng(DeriveSeed(options.seed, 1 + epoch));
    std::vector<TrainingWindow> windows;
    for (size_t u = 0; u < utterances.size(); ++u) {
      const auto& pairs = utterances[u].windows;
      for (size_t j = 0; j < options.windows_per_utterance; ++j) {
        windows.push_back(MakeWindow(utterances[u], pairs[rng.Below(pairs.size())], labels[u]));
      }
    }
    for (size_t i = windows.size(); i > 1; --i) std::swap(windows[i - 1], windows[rng.Below(i)]);

    EpochStats stats;
    stats.epoch = epoch + 1;
    for (size_t begin = 0; begin < windows.size(); begin += batch) {
      const size_t end = std::min(windows.size(), begin + batch);
      std::vector<const TrainingWindow*> ptrs;
      for (size_t i = begin; i < end; ++i) ptrs.push_back(&windows[i]);
      const StepResult r = trainer.Step(ptrs);
      const double weight = static_cast<double>(end - begin) / windows.size();
      stats.loss += r.loss * weight;
      stats.accuracy += r.accuracy * weight;
    }
    history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return history;
}

}  // namespace supervoice
