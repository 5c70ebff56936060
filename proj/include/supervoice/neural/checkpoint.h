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

#ifndef SUPERVOICE_NEURAL_CHECKPOINT_H_
#define SUPERVOICE_NEURAL_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "supervoice/neural/model.h"

namespace supervoice {

constexpr uint32_t kCheckpointVersion = 1;

// Container layout, all integers little-endian:
//   "SVCKPT\0\0"  u32 version
//   u32 n_config, n_config x (u32 len, key bytes, u32 len, value bytes)
//   u32 n_tensors, n_tensors x (u32 len, name bytes, u32 rank, rank x u32 dim,
//                               product(dims) x f32)
// Tensors are the SpeakerModel parameters in Params() order; a training head
// is never written.
std::string SerializeCheckpoint(SpeakerModel<float>& model);
void SaveCheckpoint(SpeakerModel<float>& model, const std::filesystem::path& path);

// Throws Error(kVersionMismatch), Error(kCorruptFile) or Error(kNotFound).
std::unique_ptr<SpeakerModel<float>> DeserializeCheckpoint(const std::string& bytes);
std::unique_ptr<SpeakerModel<float>> LoadCheckpoint(const std::filesystem::path& path);

// Lower-case hex SHA-256 of the serialized checkpoint.
std::string Sha256Hex(const std::string& bytes);
std::string CheckpointHash(SpeakerModel<float>& model);

}  // namespace supervoice

#endif  // SUPERVOICE_NEURAL_CHECKPOINT_H_
