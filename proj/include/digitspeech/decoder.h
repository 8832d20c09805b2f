// include/digitspeech/decoder.h

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

#ifndef DIGITSPEECH_DECODER_H_
#define DIGITSPEECH_DECODER_H_

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "digitspeech/acoustic_model.h"
#include "digitspeech/execution.h"
#include "digitspeech/frontend.h"
#include "digitspeech/grammar.h"
#include "digitspeech/lexicon.h"

namespace digitspeech {

inline constexpr double kUnlimitedBeam = std::numeric_limits<double>::infinity();
inline constexpr int kUnlimitedActive = std::numeric_limits<int>::max();

struct DecoderConfig {
  // Natural-log beam relative to the best token of each frame.
  double beam_width_log = 200.0;
  // Added to every word entry; applied when the search graph is built.
  double word_insertion_penalty_log = 0.0;
  int max_active = 20000;

  void Validate() const;
};

// State-level search network. Emitting nodes carry an HMM state; the other
// kinds are non-emitting and form an acyclic sub-graph, visited in
// `epsilon_order` within a frame.
struct SearchGraph {
  enum class NodeKind { kStart, kFinal, kGrammarIn, kGrammarOut, kEmitting, kWordEnd };

  struct Node {
    NodeKind kind = NodeKind::kStart;
    int senone = -1;    // kEmitting: index into senones
    int word = -1;      // kWordEnd: word id; kEmitting: word id of its chain, -1 for silence
    int fsa_state = -1; // kGrammarIn / kGrammarOut
  };
  struct Arc {
    int from = 0;
    int to = 0;
    double log_prob = 0.0;
  };
  struct Senone {
    std::string phone;
    int state = 0;
  };

  std::vector<Node> nodes;
  std::vector<Arc> arcs;  // sorted by (from, to)
  std::vector<Senone> senones;
  std::vector<std::string> words;
  int start = 0;
  int final = 0;
  std::vector<int> epsilon_order;
  // CSR index of arcs by source node.
  std::vector<int> arc_begin;

  std::span<const Arc> OutArcs(int node) const {
    return {arcs.data() + arc_begin[node],
            static_cast<std::size_t>(arc_begin[node + 1] - arc_begin[node])};
  }
  bool IsEmitting(int node) const { return nodes[node].kind == NodeKind::kEmitting; }

  struct Stats {
    int nodes = 0;
    int emitting = 0;
    int word_ends = 0;
    int grammar = 0;
    int arcs = 0;
    int senones = 0;
  };
  Stats ComputeStats() const;
};

// Expands every FSA word edge into its phone chain and each phone into its
// HMM states. With optional_silence a skippable SIL model sits at every
// grammar state. Throws OutOfVocabulary, MissingPhoneModel, and
// NoSurvivingPath when the final node is unreachable.
SearchGraph BuildSearchGraph(const WordFsa& fsa, const Lexicon& lexicon,
                             const AcousticModel& model, bool optional_silence,
                             double word_insertion_penalty_log = 0.0);

struct WordSpan {
  int start_frame = 0;
  int end_frame = 0;  // inclusive
};

struct Hypothesis {
  struct Step {
    int frame = -1;  // -1 for nodes visited before the first frame
    int node = 0;
  };

  std::string source_id;
  std::vector<std::string> words;
  double log_score = 0.0;
  std::vector<WordSpan> spans;
  // Full best path from start to final node.
  std::vector<Step> trace;

  bool operator==(const Hypothesis& o) const {
    return words == o.words && log_score == o.log_score && source_id == o.source_id;
  }
};

// Time-synchronous Viterbi with per-frame beam and max_active pruning.
// Ties go to the lower predecessor node index. Throws NoSurvivingPath,
// DimensionMismatch, TooShort (no frames), MissingPhoneModel.
Hypothesis ViterbiDecode(const SearchGraph& graph, const AcousticModel& model,
                         const FeatureSequence& features, const DecoderConfig& config);

std::vector<Hypothesis> DecodeBatch(const SearchGraph& graph, const AcousticModel& model,
                                    std::span<const FeatureSequence> features,
                                    const DecoderConfig& config, Execution execution);

// LoadWav -> ValidateRate(model.sample_rate_hz) -> Mfcc -> ViterbiDecode.
Hypothesis DecodeFile(const std::filesystem::path& wav_path, const AcousticModel& model,
                      const SearchGraph& graph, const FrontendConfig& frontend,
                      const DecoderConfig& config);

// "<utterance-id> <words...> <log_score>"
std::string FormatHypothesis(const Hypothesis& hyp);

}  // namespace digitspeech

#endif  // DIGITSPEECH_DECODER_H_
