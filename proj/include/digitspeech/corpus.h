// include/digitspeech/corpus.h

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

#ifndef DIGITSPEECH_CORPUS_H_
#define DIGITSPEECH_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "digitspeech/decoder.h"
#include "digitspeech/frontend.h"
#include "digitspeech/lexicon.h"
#include "digitspeech/trainer.h"

namespace digitspeech {

enum class Sex { kMale, kFemale, kUnknown };

// 'M', 'W' or '?'.
char SexLetter(Sex sex);

struct ManifestEntry {
  std::string utterance_id;
  // Relative path without extension, as listed in the fileids file.
  std::string wav_path;
  std::vector<std::string> transcript;
  std::string speaker_id;
  Sex speaker_sex = Sex::kUnknown;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;

  const ManifestEntry* Find(std::string_view utterance_id) const;
  // Fails with OutOfVocabulary on the first word missing from lexicon.
  void CheckVocabulary(const Lexicon& lexicon) const;
};

// Speaker id of an utterance id: the text before the first '_'
// ("spk2_d4_t2" -> "spk2").
std::string SpeakerOf(std::string_view utterance_id);

// Joins a fileids list (one relative path per line, no extension; the
// utterance id is the last path component) with a transcription file of
// "<s> WORDS </s> (utterance_id)" lines. The optional speaker table has
// "<speaker> <M|W>" lines. Entries keep the fileids order. Errors:
// OrphanFileid, OrphanTranscript, BadTranscriptLine (with line number).
CorpusManifest ParseManifest(std::string_view fileids_text,
                             std::string_view transcription_text,
                             std::string_view speakers_text = {});

struct SpeakerResult {
  std::string speaker_id;
  Sex sex = Sex::kUnknown;
  // Correct count per trial index (from "_t<k>" in the utterance id), in
  // ascending trial order; empty when ids carry no trial.
  std::map<int, int> correct_per_trial;
  std::map<int, int> total_per_trial;
  int correct = 0;
  int total = 0;
  double rate = 0.0;           // exact 100 * correct / total
  double reported_rate = 0.0;  // truncated to 2 decimals
};

struct GroupResult {
  Sex sex = Sex::kUnknown;
  int num_speakers = 0;
  double mean_rate = 0.0;           // mean of exact speaker rates
  double reported_mean_rate = 0.0;  // truncated to 2 decimals
};

struct EvalReport {
  std::vector<SpeakerResult> speakers;  // sorted by speaker id
  std::vector<GroupResult> groups;      // M then W, only when present
  int correct = 0;
  int total = 0;
  double overall_rate = 0.0;
  double reported_overall_rate = 0.0;

  bool operator==(const EvalReport& o) const;
};

// Truncates toward zero to 2 decimals (86.666... -> 86.66), tolerant of
// representation error just below a hundredth.
double TruncateToHundredths(double value);

// An utterance is correct iff the hypothesis equals the transcript exactly.
// Throws MissingHypothesis.
EvalReport Evaluate(const CorpusManifest& manifest,
                    const std::map<std::string, std::vector<std::string>>& hypotheses);

// Fixed-width table: Speaker | trial columns | Correct/Total | Rate%, then
// group rows and an overall row.
std::string FormatReport(const EvalReport& report);

struct SystemPaths {
  std::string phones;
  std::string dictionary;
  std::string grammar;
  std::string model;
  std::string manifest_fileids;
  std::string manifest_trans;
  std::string speakers;
  // Root that fileids entries are relative to; defaults to the directory
  // of the fileids file.
  std::string wav_dir;
};

struct SystemConfig {
  FrontendConfig frontend;
  TrainingConfig trainer;
  DecoderConfig decoder;
  SystemPaths paths;
  bool optional_silence = true;
};

// "section.key = value" lines; '#' comments; relative paths are resolved
// against base_dir. Unknown keys and bad values raise ConfigError with the
// line number.
SystemConfig ParseSystemConfig(std::string_view text, const std::filesystem::path& base_dir);
SystemConfig LoadSystemConfig(const std::filesystem::path& path);

struct SynthSpec {
  int num_digits = 10;
  int num_speakers = 6;
  int num_repetitions = 5;
  int sample_rate_hz = kCorpusSampleRateHz;
  double phone_ms = 120.0;
  double padding_ms = 60.0;
};

// Dominant-first sinusoid frequencies (Hz) assigned to a phone of the set.
std::vector<double> SynthPhoneFrequencies(const PhoneSet& phones, std::string_view phone);

// Renders one utterance of `phones`; same seed, same samples.
AudioSignal SynthesizeUtterance(const std::vector<std::string>& phones, const PhoneSet& phone_set,
                                double frequency_scale, double gain, std::uint64_t noise_seed,
                                const SynthSpec& spec, std::string source_id);

struct SynthCorpus {
  CorpusManifest manifest;
  std::filesystem::path fileids;
  std::filesystem::path transcription;
  std::filesystem::path speakers;
};

// Writes <out_dir>/wav/spk<k>/spk<k>_d<d>_t<r>.wav plus corpus.fileids
// (entries relative to out_dir),
// corpus.transcription and speakers.txt. Speakers 1..ceil(n/2) are M, the
// rest W. Deterministic in seed. Throws IoError.
SynthCorpus SynthesizeCorpus(std::uint64_t seed, const SynthSpec& spec, const Lexicon& lexicon,
                             const std::filesystem::path& out_dir);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace digitspeech

#endif  // DIGITSPEECH_CORPUS_H_
