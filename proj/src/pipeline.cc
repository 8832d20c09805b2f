// src/pipeline.cc

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

#include "digitspeech/pipeline.h"

#include "digitspeech/errors.h"
#include "parallel_for.h"

namespace digitspeech {

PhoneSet LoadPhoneSet(const SystemPaths& paths) {
  if (paths.phones.empty()) return PhoneSet::ArabicDigits();
  return PhoneSet::Parse(ReadTextFile(paths.phones));
}

Lexicon LoadLexicon(const SystemPaths& paths) {
  if (paths.dictionary.empty())
    throw Error(ErrorCode::kConfigError, "no dictionary path configured");
  return ParseDictionary(ReadTextFile(paths.dictionary), LoadPhoneSet(paths));
}

WordFsa LoadGrammar(const std::filesystem::path& path) {
  if (path.empty()) throw Error(ErrorCode::kConfigError, "no grammar path configured");
  return CompileFsa(ParseJsgf(ReadTextFile(path)));
}

WordFsa LoadGrammar(const std::filesystem::path& path, const Lexicon& lexicon) {
  WordFsa fsa = LoadGrammar(path);
  for (const auto& word : fsa.Terminals())
    if (!lexicon.Contains(word))
      throw Error(ErrorCode::kOutOfVocabulary,
                  "grammar word '" + word + "' is not in the dictionary");
  return fsa;
}

CorpusManifest LoadManifest(const SystemPaths& paths) {
  if (paths.manifest_fileids.empty() || paths.manifest_trans.empty())
    throw Error(ErrorCode::kConfigError, "manifest fileids and transcription paths are required");
  std::string speakers;
  if (!paths.speakers.empty() && std::filesystem::exists(paths.speakers))
    speakers = ReadTextFile(paths.speakers);
  return ParseManifest(ReadTextFile(paths.manifest_fileids), ReadTextFile(paths.manifest_trans),
                       speakers);
}

std::filesystem::path WavPathOf(const SystemPaths& paths, const ManifestEntry& entry) {
  const std::filesystem::path root =
      paths.wav_dir.empty() ? std::filesystem::path(paths.manifest_fileids).parent_path()
                            : std::filesystem::path(paths.wav_dir);
  return root / (entry.wav_path + ".wav");
}

CorpusManifest SelectSpeakers(const CorpusManifest& manifest,
                              const std::set<std::string>& speakers, bool keep) {
  CorpusManifest out;
  for (const auto& e : manifest.entries)
    if ((speakers.count(e.speaker_id) != 0) == keep) out.entries.push_back(e);
  return out;
}

std::vector<AudioSignal> LoadCorpusAudio(const CorpusManifest& manifest,
                                         const SystemPaths& paths, Execution execution) {
  std::vector<AudioSignal> audio(manifest.entries.size());
  ParallelFor(audio.size(), execution, [&](std::size_t i) {
    audio[i] = LoadWav(WavPathOf(paths, manifest.entries[i]));
    audio[i].source_id = manifest.entries[i].utterance_id;
    ValidateRate(audio[i], kCorpusSampleRateHz);
  });
  return audio;
}

std::vector<UtteranceExample> ExtractExamples(const CorpusManifest& manifest,
                                              const std::vector<AudioSignal>& audio,
                                              const FrontendConfig& frontend,
                                              Execution execution) {
  auto features = MfccBatch(audio, frontend, execution);
  std::vector<UtteranceExample> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i)
    out.push_back({manifest.entries[i].utterance_id, std::move(features[i]),
                   manifest.entries[i].transcript});
  return out;
}

std::map<std::string, Hypothesis> DecodeManifest(const CorpusManifest& manifest,
                                                 const std::vector<AudioSignal>& audio,
                                                 const AcousticModel& model,
                                                 const SearchGraph& graph,
                                                 const DecoderConfig& config,
                                                 Execution execution) {
  for (const auto& a : audio) ValidateRate(a, model.sample_rate_hz);
  const auto features = MfccBatch(audio, model.frontend, execution);
  auto hyps = DecodeBatch(graph, model, features, config, execution);
  std::map<std::string, Hypothesis> out;
  for (std::size_t i = 0; i < hyps.size(); ++i)
    out.emplace(manifest.entries[i].utterance_id, std::move(hyps[i]));
  return out;
}

std::map<std::string, std::vector<std::string>> HypothesisWords(
    const std::map<std::string, Hypothesis>& hypotheses) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [id, h] : hypotheses) out.emplace(id, h.words);
  return out;
}

}  // namespace digitspeech
