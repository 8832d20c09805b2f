// include/digitspeech/audio_io.h

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

#ifndef DIGITSPEECH_AUDIO_IO_H_
#define DIGITSPEECH_AUDIO_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace digitspeech {

// Corpus recording parameters: 16 kHz, 16-bit, mono.
inline constexpr int kCorpusSampleRateHz = 16000;

// Mono PCM audio normalized to [-1, 1] (int16 / 32768).
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate_hz = 0;
  std::string source_id;
};

// Parses a RIFF/WAVE image held in memory. Only PCM, 1 channel, 16 bit is
// accepted; chunks other than "fmt " and "data" are skipped.
AudioSignal ParseWav(std::span<const std::uint8_t> bytes,
                     const std::string& source_id);

// Reads and parses a file. source_id is the file stem.
AudioSignal LoadWav(const std::filesystem::path& path);

// Encodes as 16-bit mono PCM. Samples are scaled by 32768, rounded and
// clamped to the int16 range.
std::vector<std::uint8_t> EncodeWav(const AudioSignal& signal);
void WriteWav(const AudioSignal& signal, const std::filesystem::path& path);

// Throws SampleRateMismatch unless signal.sample_rate_hz == required_hz.
void ValidateRate(const AudioSignal& signal, int required_hz);

}  // namespace digitspeech

#endif  // DIGITSPEECH_AUDIO_IO_H_
