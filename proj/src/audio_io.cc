// src/audio_io.cc

// Copyright 2026  The digitspeech Authors

// See COPYING in the project root for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "digitspeech/audio_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "digitspeech/errors.h"

namespace digitspeech {

namespace {

constexpr double kPcmScale = 32768.0;

std::uint32_t ReadU32(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint32_t>(b[pos]) |
         (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
         (static_cast<std::uint32_t>(b[pos + 2]) << 16) |
         (static_cast<std::uint32_t>(b[pos + 3]) << 24);
}

std::uint16_t ReadU16(std::span<const std::uint8_t> b, std::size_t pos) {
  return static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
}

bool TagIs(std::span<const std::uint8_t> b, std::size_t pos, const char* tag) {
  return std::memcmp(b.data() + pos, tag, 4) == 0;
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioSignal ParseWav(std::span<const std::uint8_t> bytes,
                     const std::string& source_id) {
  if (bytes.size() < 12 || !TagIs(bytes, 0, "RIFF") || !TagIs(bytes, 8, "WAVE"))
    throw Error(ErrorCode::kMalformedWav, source_id + ": missing RIFF/WAVE header");

  bool have_fmt = false;
  bool have_data = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    std::uint32_t size = ReadU32(bytes, pos + 4);
    std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      // Some writers leave a bogus size on the final data chunk; tolerate a
      // truncated data chunk but nothing else.
      if (TagIs(bytes, pos, "data") && !have_data) {
        size = static_cast<std::uint32_t>(bytes.size() - body);
      } else {
        throw Error(ErrorCode::kMalformedWav,
                    source_id + ": chunk extends past end of file");
      }
    }
    if (TagIs(bytes, pos, "fmt ")) {
      if (size < 16)
        throw Error(ErrorCode::kMalformedWav, source_id + ": short fmt chunk");
      format = ReadU16(bytes, body);
      channels = ReadU16(bytes, body + 2);
      rate = ReadU32(bytes, body + 4);
      bits = ReadU16(bytes, body + 14);
      have_fmt = true;
    } else if (TagIs(bytes, pos, "data")) {
      data = bytes.subspan(body, size);
      have_data = true;
    }
    // Chunks are padded to even length.
    pos = body + size + (size & 1u);
  }

  if (!have_fmt || !have_data)
    throw Error(ErrorCode::kMalformedWav,
                source_id + ": missing " + (have_fmt ? "data" : "fmt") + " chunk");
  if (format != 1)
    throw Error(ErrorCode::kUnsupportedFormat,
                source_id + ": format code " + std::to_string(format) + " is not PCM");
  if (channels != 1)
    throw Error(ErrorCode::kUnsupportedFormat,
                source_id + ": " + std::to_string(channels) + " channels, expected mono");
  if (bits != 16)
    throw Error(ErrorCode::kUnsupportedFormat,
                source_id + ": " + std::to_string(bits) + " bits per sample, expected 16");
  if (rate == 0)
    throw Error(ErrorCode::kMalformedWav, source_id + ": zero sample rate");

  const std::size_t count = data.size() / 2;
  if (count == 0)
    throw Error(ErrorCode::kEmptyAudio, source_id + ": no samples");

  AudioSignal signal;
  signal.sample_rate_hz = static_cast<int>(rate);
  signal.source_id = source_id;
  signal.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto raw = static_cast<std::int16_t>(ReadU16(data, 2 * i));
    signal.samples[i] = raw / kPcmScale;
  }
  return signal;
}

AudioSignal LoadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ParseWav(bytes, path.stem().string());
}

std::vector<std::uint8_t> EncodeWav(const AudioSignal& signal) {
  const auto data_bytes = static_cast<std::uint32_t>(signal.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(signal.sample_rate_hz));
  PutU32(out, static_cast<std::uint32_t>(signal.sample_rate_hz) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (double x : signal.samples) {
    double scaled = std::nearbyint(x * kPcmScale);
    scaled = std::clamp(scaled, -32768.0, 32767.0);
    PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return out;
}

void WriteWav(const AudioSignal& signal, const std::filesystem::path& path) {
  const auto bytes = EncodeWav(signal);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

void ValidateRate(const AudioSignal& signal, int required_hz) {
  if (signal.sample_rate_hz != required_hz)
    throw SampleRateMismatch(signal.sample_rate_hz, required_hz);
}

}  // namespace digitspeech
