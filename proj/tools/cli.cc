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

#include "cli.h"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "supervoice/audio_io.h"
#include "supervoice/errors.h"
#include "supervoice/liveness.h"
#include "supervoice/metrics.h"
#include "supervoice/neural/checkpoint.h"
#include "supervoice/parallel.h"
#include "supervoice/pipeline.h"
#include "supervoice/preprocess.h"
#include "supervoice/spectrum.h"
#include "supervoice/synthcorpus.h"

namespace supervoice {
namespace {

namespace fs = std::filesystem;

constexpr const char* kEnvPrefix = "SUPERVOICE_";

std::string EnvName(const std::string& key) {
  std::string name = kEnvPrefix;
  for (char c : key) name.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(c)));
  return name;
}

// Audio files named on the command line plus those listed in a manifest.
std::vector<fs::path> CollectInputs(const std::vector<std::string>& files,
                                    const std::string& manifest) {
  std::vector<fs::path> out(files.begin(), files.end());
  if (!manifest.empty()) {
    const fs::path base = fs::path(manifest).parent_path();
    for (const ManifestRow& row : ReadManifest(manifest)) out.push_back(base / row.path);
  }
  if (out.empty()) throw CLI::ValidationError("inputs", "no input files given");
  return out;
}

// One network per worker; models cache activations and are not shareable.
class ModelPool {
 public:
  ModelPool(const fs::path& checkpoint, size_t workers) {
    for (size_t i = 0; i < std::max<size_t>(1, workers); ++i) {
      models_.push_back(std::make_unique<EmbeddingModel>(EmbeddingModel::Load(checkpoint)));
      free_.push_back(models_.back().get());
    }
  }

  template <typename Fn>
  auto With(Fn&& fn) {
    EmbeddingModel* m;
    {
      std::lock_guard<std::mutex> lock(mu_);
      m = free_.back();
      free_.pop_back();
    }
    struct Release {
      ModelPool* pool;
      EmbeddingModel* model;
      ~Release() {
        std::lock_guard<std::mutex> lock(pool->mu_);
        pool->free_.push_back(model);
      }
    } release{this, m};
    return fn(*m);
  }

  const std::string& hash() const { return models_.front()->hash; }

 private:
  std::vector<std::unique_ptr<EmbeddingModel>> models_;
  std::vector<EmbeddingModel*> free_;
  std::mutex mu_;
};

struct Globals {
  size_t jobs = 1;
};

// ---------------------------------------------------------------- synth

struct SynthArgs {
  CorpusOptions corpus;
  std::string out_dir;
};

int RunSynth(const SynthArgs& a, const Globals& g, std::ostream& out) {
  CorpusOptions options = a.corpus;
  options.jobs = g.jobs;
  const std::vector<ManifestRow> rows = GenerateCorpus(options, a.out_dir);
  fmt::print(out, "wrote {} files and manifest.tsv to {}\n", rows.size(), a.out_dir);
  return kExitOk;
}

// ---------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string input, output;
  bool keep_silence = false;
  int rate = 0;
};

int RunPreprocess(const PreprocessArgs& a, std::ostream& out) {
  const AudioBuffer in = ReadWav(a.input);
  AudioBuffer buf = a.keep_silence ? in : RemoveSilence(in, SilenceParams::ForRate(in.sample_rate));
  const size_t trimmed = buf.size();
  if (a.rate > 0 && a.rate != buf.sample_rate) {
    ResampleSpec spec;
    spec.source_rate = buf.sample_rate;
    spec.target_rate = a.rate;
    buf = Downsample(buf, spec);
  }
  WriteWav(buf, a.output);
  fmt::print(out, "{}\t{} samples\t{} after silence removal\t{} samples at {} Hz\n", a.input,
             in.size(), trimmed, buf.size(), buf.sample_rate);
  return kExitOk;
}

// ---------------------------------------------------------------- spectrogram

struct SpectrogramArgs {
  std::string input, output;
  bool preliminary = false;
  double low = -1.0, high = -1.0;
};

int RunSpectrogram(const SpectrogramArgs& a, std::ostream& out) {
  const AudioBuffer in = ReadWav(a.input);
  const StftConfig config =
      a.preliminary ? StftConfig::Preliminary(in.sample_rate) : StftConfig::Canonical();
  Spectrogram spec = Stft(in, config);
  if (a.low >= 0.0 || a.high >= 0.0) {
    const double low = std::max(0.0, a.low);
    const double high = a.high >= 0.0 ? a.high : in.sample_rate / 2.0;
    spec = CropBand(spec, low, high);
  }
  WriteSpectrogram(spec, config.n_fft, a.output);
  fmt::print(out, "{}\t{} bins x {} frames\t{:.2f} Hz/bin\n", a.output, spec.rows, spec.cols,
             spec.freq_resolution);
  return kExitOk;
}

// ---------------------------------------------------------------- liveness

struct LivenessArgs {
  std::vector<std::string> files;
  std::string manifest;
  bool keep_silence = false;
};

int RunLiveness(const LivenessArgs& a, const Globals& g, std::ostream& out) {
  const std::vector<fs::path> inputs = CollectInputs(a.files, a.manifest);
  PipelineConfig config;
  config.remove_silence = !a.keep_silence;
  std::vector<LivenessReport> reports(inputs.size());
  ParallelFor(inputs.size(), g.jobs, [&](size_t i) {
    reports[i] = Preprocess(ReadWav(inputs[i]), config).liveness;
  });
  int code = kExitOk;
  for (size_t i = 0; i < inputs.size(); ++i) {
    fmt::print(out, "{}\t{:.6f}\t{:.6f}\t{}\n", inputs[i].string(), reports[i].r1,
               reports[i].r2, VerdictName(reports[i].verdict));
    if (reports[i].verdict != Verdict::kLive) code = kExitRejected;
  }
  return code;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string manifest, out;
  std::string preset = "desk";
  TrainingOptions training;
};

int RunTrain(const TrainArgs& a, const Globals& g, std::ostream& out) {
  const fs::path base = fs::path(a.manifest).parent_path();
  std::vector<ManifestRow> rows;
  for (const ManifestRow& r : ReadManifest(a.manifest)) {
    if (r.kind == kKindGenuine) rows.push_back(r);
  }
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "manifest has no genuine utterances");
  std::map<std::string, int> speaker_index;
  for (const ManifestRow& r : rows) speaker_index.emplace(r.speaker, 0);
  int next = 0;
  for (auto& [name, index] : speaker_index) index = next++;
  if (speaker_index.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "training needs at least two speakers");
  }

  PipelineConfig config;
  std::vector<UtteranceFeatures> features(rows.size());
  std::vector<int> labels(rows.size());
  ParallelFor(rows.size(), g.jobs, [&](size_t i) {
    features[i] = ExtractFeatures(Preprocess(ReadWav(base / rows[i].path), config).trimmed, config);
    labels[i] = speaker_index.at(rows[i].speaker);
  });

  const ModelConfig mc = a.preset == "paper" ? ModelConfig::Paper() : ModelConfig::Desk();
  SpeakerModel<float> model(mc);
  model.Init(a.training.seed);
  fmt::print(out, "training {} preset: {} parameters, {} utterances, {} speakers\n", a.preset,
             model.ParameterCount(), rows.size(), speaker_index.size());
  TrainSpeakerModel(model, features, labels, speaker_index.size(), a.training, config,
                    [&](const EpochStats& s) {
                      fmt::print(out, "epoch {}\tloss={:.6f}\taccuracy={:.4f}\n", s.epoch,
                                 s.loss, s.accuracy);
                      out.flush();
                    });
  SaveCheckpoint(model, a.out);
  fmt::print(out, "checkpoint {}\tsha256={}\n", a.out, CheckpointHash(model));
  return kExitOk;
}

// ---------------------------------------------------------------- enroll

struct EnrollArgs {
  std::string model, store, speaker, manifest;
  std::vector<std::string> files;
};

int RunEnroll(const EnrollArgs& a, std::ostream& out) {
  std::vector<fs::path> inputs = CollectInputs(a.files, a.manifest);
  EmbeddingModel model = EmbeddingModel::Load(a.model);
  std::unique_ptr<EnrollmentStore> store =
      fs::exists(a.store) ? EnrollmentStore::Load(a.store)
                          : std::make_unique<EnrollmentStore>(model.hash, model.model->config().embedding);
  std::vector<AudioBuffer> audio;
  for (const fs::path& p : inputs) audio.push_back(ReadWav(p));
  const size_t n = Enroll(a.speaker, audio, model, *store, PipelineConfig{});
  store->Save(a.store);
  fmt::print(out, "enrolled {} utterances for {}; store now holds {}\n", n, a.speaker,
             store->Embeddings(a.speaker).size());
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string model, store, speaker, manifest;
  std::vector<std::string> files;
  double gamma = 0.0;
};

struct TrialResult {
  bool spoof = false;
  double similarity = -1.0;
  bool accepted = false;
};

TrialResult RunTrial(const fs::path& path, const std::string& speaker,
                     const EnrollmentStore& store, ModelPool& pool, double gamma) {
  const AudioBuffer audio = ReadWav(path);
  return pool.With([&](EmbeddingModel& m) {
    TrialResult r;
    try {
      const VerifyOutcome v = Verify(audio, speaker, store, m, gamma, PipelineConfig{});
      r.similarity = v.decision.similarity;
      r.accepted = v.decision.accepted;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSpoofDetected) throw;
      r.spoof = true;
    }
    return r;
  });
}

int RunVerify(const VerifyArgs& a, const Globals& g, std::ostream& out) {
  const std::vector<fs::path> inputs = CollectInputs(a.files, a.manifest);
  const std::unique_ptr<EnrollmentStore> store = EnrollmentStore::Load(a.store);
  ModelPool pool(a.model, std::min(g.jobs, inputs.size()));
  store->Embeddings(a.speaker);  // fails fast with UnknownSpeaker
  std::vector<TrialResult> results(inputs.size());
  ParallelFor(inputs.size(), g.jobs, [&](size_t i) {
    results[i] = RunTrial(inputs[i], a.speaker, *store, pool, a.gamma);
  });
  int code = kExitOk;
  for (size_t i = 0; i < inputs.size(); ++i) {
    const TrialResult& r = results[i];
    if (r.spoof) {
      fmt::print(out, "{}\t{}\t-\tSpoofDetected\n", inputs[i].string(), a.speaker);
      code = kExitRejected;
    } else {
      fmt::print(out, "{}\t{}\tsimilarity={:.6f}\t{}\n", inputs[i].string(), a.speaker,
                 r.similarity, r.accepted ? "ACCEPT" : "REJECT");
      if (!r.accepted) code = kExitRejected;
    }
  }
  return code;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string scores, trials, model, store;
  std::optional<double> gamma;
};

bool ParseLabel(const std::string& label) {
  if (label == "genuine" || label == "target" || label == "1") return true;
  if (label == "impostor" || label == "nontarget" || label == "0") return false;
  throw Error(ErrorCode::kInvalidArgument, "unknown trial label '" + label + "'");
}

std::vector<std::vector<std::string>> ReadTsv(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    rows.push_back(std::move(cols));
  }
  return rows;
}

int RunEval(const EvalArgs& a, const Globals& g, std::ostream& out) {
  TrialSet trials;
  if (!a.scores.empty()) {
    // score<TAB>label
    for (const auto& cols : ReadTsv(a.scores)) {
      if (cols.size() < 2) throw Error(ErrorCode::kCorruptFile, "score rows need 2 columns");
      if (cols[0] == "score") continue;
      trials.Add(std::stod(cols[0]), ParseLabel(cols[1]));
    }
  } else {
    // path<TAB>claimed speaker<TAB>label; a spoof verdict scores -1.
    const fs::path base = fs::path(a.trials).parent_path();
    std::vector<std::vector<std::string>> rows;
    for (auto& cols : ReadTsv(a.trials)) {
      if (cols.size() < 3) throw Error(ErrorCode::kCorruptFile, "trial rows need 3 columns");
      if (cols[0] == "path") continue;
      rows.push_back(std::move(cols));
    }
    const std::unique_ptr<EnrollmentStore> store = EnrollmentStore::Load(a.store);
    ModelPool pool(a.model, std::min(g.jobs, rows.size()));
    std::vector<TrialResult> results(rows.size());
    ParallelFor(rows.size(), g.jobs, [&](size_t i) {
      results[i] = RunTrial(base / rows[i][0], rows[i][1], *store, pool, 0.0);
    });
    for (size_t i = 0; i < rows.size(); ++i) {
      trials.Add(results[i].spoof ? -1.0 : results[i].similarity, ParseLabel(rows[i][2]));
    }
  }

  const EerResult eer = Eer(trials);
  const double gamma = a.gamma.value_or(eer.threshold);
  std::vector<std::string> predicted, truth;
  for (size_t i = 0; i < trials.size(); ++i) {
    predicted.push_back(trials.scores[i] >= gamma ? "accept" : "reject");
    truth.push_back(trials.genuine[i] ? "accept" : "reject");
  }
  const ErrorRates at_gamma = FarFrr(trials, gamma);
  fmt::print(out, "threshold\tFAR\tFRR\n");
  for (const DetPoint& p : DetCurve(trials)) {
    fmt::print(out, "{:.6f}\t{:.6f}\t{:.6f}\n", p.threshold, p.far, p.frr);
  }
  fmt::print(out, "EER={:.6f}\tthreshold={:.6f}\tgamma={:.6f}\tFAR={:.6f}\tFRR={:.6f}\tCER={:.6f}\n",
             eer.eer, eer.threshold, gamma, at_gamma.far, at_gamma.frr, Cer(predicted, truth));
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SuperVoice speaker verification and ultrasonic liveness toolkit.\n"
               "Options may also come from supervoice.conf (key=value lines, [subcommand]\n"
               "sections) or from SUPERVOICE_<OPTION> environment variables; command-line\n"
               "flags take precedence.",
               "supervoice"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "supervoice.conf", "Read defaults from this key=value file");
  app.allow_config_extras(false);

  Globals globals;
  app.add_option("-j,--jobs", globals.jobs, "Worker threads for per-file work")
      ->envname(EnvName("jobs"))
      ->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic corpus and manifest");
  synth_cmd->add_option("--speakers", synth.corpus.n_speakers, "Number of speakers")
      ->check(CLI::Range(2, 99));
  synth_cmd->add_option("--utt", synth.corpus.utt_per_speaker, "Utterances per speaker")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.corpus.seed, "Corpus seed")->envname(EnvName("seed"));
  synth_cmd->add_option("--duration", synth.corpus.duration_seconds, "Seconds per utterance")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Remove silence and optionally downsample");
  pre_cmd->add_option("input", pre.input, "Input WAV")->required()->check(CLI::ExistingFile);
  pre_cmd->add_option("output", pre.output, "Output WAV (float-32)")->required();
  pre_cmd->add_flag("--keep-silence", pre.keep_silence, "Skip silence removal");
  pre_cmd->add_option("--rate", pre.rate, "Downsample to this rate (Hz)");

  SpectrogramArgs spec;
  auto* spec_cmd = app.add_subcommand("spectrogram", "Export a dB STFT spectrogram");
  spec_cmd->add_option("input", spec.input, "Input WAV")->required()->check(CLI::ExistingFile);
  spec_cmd->add_option("output", spec.output, "Output .svspec file")->required();
  spec_cmd->add_flag("--preliminary", spec.preliminary, "10 ms window, 2 ms hop");
  spec_cmd->add_option("--low", spec.low, "Crop: lowest kept frequency (Hz)");
  spec_cmd->add_option("--high", spec.high, "Crop: frequency bound, exclusive (Hz)");

  LivenessArgs live;
  auto* live_cmd = app.add_subcommand("liveness", "Liveness verdict per file (exit 2 on spoof)");
  live_cmd->add_option("files", live.files, "Input WAVs")->check(CLI::ExistingFile);
  live_cmd->add_option("--manifest", live.manifest, "Manifest of inputs")
      ->check(CLI::ExistingFile);
  live_cmd->add_flag("--keep-silence", live.keep_silence, "Skip silence removal");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the embedding network from a manifest");
  train_cmd->add_option("--manifest", train.manifest, "Corpus manifest")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();
  train_cmd->add_option("--preset", train.preset, "Architecture size")
      ->check(CLI::IsMember({"desk", "paper"}));
  train_cmd->add_option("--epochs", train.training.epochs, "Training epochs");
  train_cmd->add_option("--batch", train.training.batch, "Windows per optimizer step")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.training.lr, "RMSprop learning rate");
  train_cmd->add_option("--seed", train.training.seed, "Initialization and sampling seed")
      ->envname(EnvName("seed"));
  train_cmd->add_option("--windows-per-utt", train.training.windows_per_utterance,
                        "Window pairs drawn per utterance per epoch")
      ->check(CLI::PositiveNumber);

  EnrollArgs enroll;
  auto* enroll_cmd = app.add_subcommand("enroll", "Add a speaker's utterances to a store");
  enroll_cmd->add_option("--model", enroll.model, "Checkpoint")
      ->required()
      ->envname(EnvName("model"));
  enroll_cmd->add_option("--store", enroll.store, "Enrollment store (created if absent)")
      ->required()
      ->envname(EnvName("store"));
  enroll_cmd->add_option("--speaker", enroll.speaker, "Speaker id")->required();
  enroll_cmd->add_option("files", enroll.files, "Enrollment WAVs")->check(CLI::ExistingFile);
  enroll_cmd->add_option("--manifest", enroll.manifest, "Manifest of enrollment WAVs")
      ->check(CLI::ExistingFile);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Verify files against an enrolled speaker");
  verify_cmd->add_option("--model", verify.model, "Checkpoint")
      ->required()
      ->envname(EnvName("model"));
  verify_cmd->add_option("--store", verify.store, "Enrollment store")
      ->required()
      ->envname(EnvName("store"));
  verify_cmd->add_option("--speaker", verify.speaker, "Claimed speaker id")->required();
  verify_cmd->add_option("--gamma", verify.gamma, "Similarity threshold (no default)")
      ->required()
      ->envname(EnvName("gamma"));
  verify_cmd->add_option("files", verify.files, "Test WAVs")->check(CLI::ExistingFile);
  verify_cmd->add_option("--manifest", verify.manifest, "Manifest of test WAVs")
      ->check(CLI::ExistingFile);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "EER, FAR/FRR, CER and DET points for trials");
  auto* scores_opt = eval_cmd->add_option("--scores", eval.scores, "score<TAB>label file")
                         ->check(CLI::ExistingFile);
  auto* trials_opt =
      eval_cmd->add_option("--trials", eval.trials, "path<TAB>claimed<TAB>label file")
          ->check(CLI::ExistingFile);
  scores_opt->excludes(trials_opt);
  auto* model_opt = eval_cmd->add_option("--model", eval.model, "Checkpoint (with --trials)")
                        ->envname(EnvName("model"));
  auto* store_opt = eval_cmd->add_option("--store", eval.store, "Enrollment store (with --trials)")
                        ->envname(EnvName("store"));
  trials_opt->needs(model_opt)->needs(store_opt);
  eval_cmd->add_option("--gamma", eval.gamma, "Threshold for FAR/FRR/CER (default: EER point)");
  eval_cmd->require_option(1, 3);

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (*synth_cmd) return RunSynth(synth, globals, out);
    if (*pre_cmd) return RunPreprocess(pre, out);
    if (*spec_cmd) return RunSpectrogram(spec, out);
    if (*live_cmd) return RunLiveness(live, globals, out);
    if (*train_cmd) return RunTrain(train, globals, out);
    if (*enroll_cmd) return RunEnroll(enroll, out);
    if (*verify_cmd) return RunVerify(verify, globals, out);
    if (*eval_cmd) {
      if (eval.scores.empty() && eval.trials.empty()) {
        err << "eval: one of --scores or --trials is required\n";
        return kExitError;
      }
      return RunEval(eval, globals, out);
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSpoofDetected || e.code() == ErrorCode::kLivenessRejected) {
      err << e.what() << "\n";
      return kExitRejected;
    }
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace supervoice
