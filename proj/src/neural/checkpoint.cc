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

#include "supervoice/neural/checkpoint.h"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "supervoice/errors.h"

namespace supervoice {
namespace {

constexpr char kMagic[8] = {'S', 'V', 'C', 'K', 'P', 'T', '\0', '\0'};

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutString(std::string& out, const std::string& s) {
  PutU32(out, static_cast<uint32_t>(s.size()));
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  void Need(size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kCorruptFile, "checkpoint truncated at byte " + std::to_string(pos_));
    }
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
  std::string String() {
    const uint32_t n = U32();
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string Raw(size_t n) {
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(SpeakerModel<float>& model) {
  std::string out(kMagic, sizeof(kMagic));
  PutU32(out, kCheckpointVersion);
  const std::map<std::string, std::string> config = model.config().ToMap();
  PutU32(out, static_cast<uint32_t>(config.size()));
  for (const auto& [key, value] : config) {
    PutString(out, key);
    PutString(out, value);
  }
  const std::vector<Param<float>> params = model.Params();
  PutU32(out, static_cast<uint32_t>(params.size()));
  for (const Param<float>& p : params) {
    PutString(out, p.name);
    PutU32(out, static_cast<uint32_t>(p.value->rank()));
    for (size_t d : p.value->shape) PutU32(out, static_cast<uint32_t>(d));
    for (float v : p.value->data) PutU32(out, std::bit_cast<uint32_t>(v));
  }
  return out;
}

void SaveCheckpoint(SpeakerModel<float>& model, const std::filesystem::path& path) {
  const std::string bytes = SerializeCheckpoint(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::kIoFailure, "cannot write checkpoint " + path.string());
}

std::unique_ptr<SpeakerModel<float>> DeserializeCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.Raw(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw Error(ErrorCode::kCorruptFile, "not a checkpoint (bad magic)");
  }
  const uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kVersionMismatch, "checkpoint version " + std::to_string(version) +
                                                 ", expected " +
                                                 std::to_string(kCheckpointVersion));
  }
  std::map<std::string, std::string> config;
  const uint32_t n_config = r.U32();
  for (uint32_t i = 0; i < n_config; ++i) {
    std::string key = r.String();
    config[key] = r.String();
  }
  ModelConfig mc = ModelConfig::FromMap(config);
  try {
    mc.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kCorruptFile, e.what());
  }
  auto model = std::make_unique<SpeakerModel<float>>(mc);
  std::vector<Param<float>> params = model->Params();
  const uint32_t n_tensors = r.U32();
  if (n_tensors != params.size()) {
    throw Error(ErrorCode::kCorruptFile, "checkpoint holds " + std::to_string(n_tensors) +
                                             " tensors; the architecture has " +
                                             std::to_string(params.size()));
  }
  for (Param<float>& p : params) {
    const std::string name = r.String();
    if (name != p.name) {
      throw Error(ErrorCode::kCorruptFile, "expected tensor " + p.name + ", found " + name);
    }
    const uint32_t rank = r.U32();
    std::vector<size_t> shape;
    for (uint32_t d = 0; d < rank; ++d) shape.push_back(r.U32());
    if (shape != p.value->shape) {
      throw Error(ErrorCode::kCorruptFile, "tensor " + name + " has shape " + ShapeString(shape));
    }
    for (float& v : p.value->data) v = std::bit_cast<float>(r.U32());
  }
  if (!r.AtEnd()) throw Error(ErrorCode::kCorruptFile, "trailing bytes after checkpoint");
  return model;
}

std::unique_ptr<SpeakerModel<float>> LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kNotFound, "cannot open checkpoint " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return DeserializeCheckpoint(bytes);
}

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoFailure, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string CheckpointHash(SpeakerModel<float>& model) {
  return Sha256Hex(SerializeCheckpoint(model));
}

}  // namespace supervoice
