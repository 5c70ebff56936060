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

#include "supervoice/audio_io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "supervoice/errors.h"

namespace supervoice {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void PutU16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

bool IsPipelineRate(int sample_rate) {
  switch (sample_rate) {
    case 16000:
    case 48000:
    case 96000:
    case 192000:
    case 256000:
      return true;
    default:
      return false;
  }
}

AudioBuffer ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  const std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string where = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kUnsupportedFormat, where + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  uint16_t format_tag = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  bool have_data = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const uint32_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    const size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available) {
        throw Error(ErrorCode::kUnsupportedFormat, where + ": bad fmt chunk");
      }
      format_tag = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Streaming writers leave the size field unset; take what is there.
      data_size = std::min<size_t>(size, available);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || !have_data) {
    throw Error(ErrorCode::kUnsupportedFormat, where + ": missing fmt or data chunk");
  }
  if (channels != 1) {
    throw Error(ErrorCode::kUnsupportedFormat,
                where + ": " + std::to_string(channels) +
                    " channels; only mono is supported");
  }
  if (rate == 0) throw Error(ErrorCode::kUnsupportedFormat, where + ": zero sample rate");

  AudioBuffer out;
  out.sample_rate = static_cast<int>(rate);
  if (format_tag == kFormatPcm && bits == 16) {
    const size_t n = data_size / 2;
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const auto v = static_cast<int16_t>(ReadU16(data + 2 * i));
      out.samples[i] = static_cast<float>(v) / 32768.0f;
    }
  } else if (format_tag == kFormatFloat && bits == 32) {
    const size_t n = data_size / 4;
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      out.samples[i] = std::bit_cast<float>(ReadU32(data + 4 * i));
    }
  } else {
    throw Error(ErrorCode::kUnsupportedFormat,
                where + ": format tag " + std::to_string(format_tag) + " with " +
                    std::to_string(bits) + " bits");
  }
  return out;
}

void WriteWav(const AudioBuffer& buffer, const std::filesystem::path& path,
              SampleFormat format) {
  if (buffer.sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  const bool pcm = format == SampleFormat::kPcm16;
  const uint16_t bytes_per_sample = pcm ? 2 : 4;
  const uint32_t data_size =
      static_cast<uint32_t>(buffer.samples.size() * bytes_per_sample);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  PutU32(&out, 36 + data_size);
  out += "WAVEfmt ";
  PutU32(&out, 16);
  PutU16(&out, pcm ? kFormatPcm : kFormatFloat);
  PutU16(&out, 1);
  PutU32(&out, static_cast<uint32_t>(buffer.sample_rate));
  PutU32(&out, static_cast<uint32_t>(buffer.sample_rate) * bytes_per_sample);
  PutU16(&out, bytes_per_sample);
  PutU16(&out, bytes_per_sample * 8);
  out += "data";
  PutU32(&out, data_size);
  for (float s : buffer.samples) {
    if (pcm) {
      const double q = std::clamp(std::nearbyint(static_cast<double>(s) * 32768.0),
                                  -32768.0, 32767.0);
      PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(q)));
    } else {
      PutU32(&out, std::bit_cast<uint32_t>(s));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

}  // namespace supervoice
