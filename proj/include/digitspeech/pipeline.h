// include/digitspeech/pipeline.h

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

#ifndef DIGITSPEECH_PIPELINE_H_
#define DIGITSPEECH_PIPELINE_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "digitspeech/acoustic_model.h"
#include "digitspeech/audio_io.h"
#include "digitspeech/corpus.h"
#include "digitspeech/decoder.h"
#include "digitspeech/execution.h"
#include "digitspeech/grammar.h"
#include "digitspeech/lexicon.h"
#include "digitspeech/trainer.h"

namespace digitspeech {

// Phone set from paths.phones, or the built-in Arabic digit set when unset.
PhoneSet LoadPhoneSet(const SystemPaths& paths);
Lexicon LoadLexicon(const SystemPaths& paths);
// Compiles the public rule of the grammar file.
WordFsa LoadGrammar(const std::filesystem::path& path);
// Also checks that every grammar terminal has a pronunciation.
WordFsa LoadGrammar(const std::filesystem::path& path, const Lexicon& lexicon);

CorpusManifest LoadManifest(const SystemPaths& paths);
std::filesystem::path WavPathOf(const SystemPaths& paths, const ManifestEntry& entry);

// Keeps entries whose speaker is (keep == true) or is not (keep == false)
// in `speakers`.
CorpusManifest SelectSpeakers(const CorpusManifest& manifest,
                              const std::set<std::string>& speakers, bool keep);

// Loads every wav of the manifest, checking the corpus sample rate.
std::vector<AudioSignal> LoadCorpusAudio(const CorpusManifest& manifest,
                                         const SystemPaths& paths, Execution execution);

std::vector<UtteranceExample> ExtractExamples(const CorpusManifest& manifest,
                                              const std::vector<AudioSignal>& audio,
                                              const FrontendConfig& frontend,
                                              Execution execution);

// Decodes each manifest utterance; the map is keyed by utterance id.
std::map<std::string, Hypothesis> DecodeManifest(const CorpusManifest& manifest,
                                                 const std::vector<AudioSignal>& audio,
                                                 const AcousticModel& model,
                                                 const SearchGraph& graph,
                                                 const DecoderConfig& config,
                                                 Execution execution);

std::map<std::string, std::vector<std::string>> HypothesisWords(
    const std::map<std::string, Hypothesis>& hypotheses);

}  // namespace digitspeech

#endif  // DIGITSPEECH_PIPELINE_H_
