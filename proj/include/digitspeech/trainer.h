// include/digitspeech/trainer.h

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

#ifndef DIGITSPEECH_TRAINER_H_
#define DIGITSPEECH_TRAINER_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "digitspeech/acoustic_model.h"
#include "digitspeech/execution.h"
#include "digitspeech/frontend.h"
#include "digitspeech/lexicon.h"

namespace digitspeech {

struct TrainingConfig {
  int max_iterations = 40;
  double convergence_rel_tol = 1e-4;
  double variance_floor = kDefaultVarianceFloor;
  // Power of two; mixtures are grown by repeated splitting.
  int target_mixtures = 1;
  bool add_optional_silence = true;
  int states_per_phone = kDefaultStatesPerPhone;

  // Throws Error(kInvalidConfig).
  void Validate() const;
};

struct UtteranceExample {
  std::string id;
  FeatureSequence features;
  std::vector<std::string> transcript;
};

// Probability of entering (and of skipping) an optional silence.
inline constexpr double kOptionalSilenceProb = 0.5;

// Flattened state chain of one utterance. Phones are referred to by their
// position in the model's (sorted) phone map, see PhoneOrder().
struct CompositeHmm {
  static constexpr int kNone = -1;

  struct State {
    int phone = 0;
    int state = 0;
  };
  // from == kNone marks an entry arc, to == kNone an exit arc. When the arc
  // realizes a model transition, (phone, row, col) name that parameter;
  // otherwise phone == kNone.
  struct Arc {
    int from = kNone;
    int to = kNone;
    double log_prob = 0.0;
    int phone = kNone;
    int row = 0;
    int col = 0;
  };

  std::vector<State> states;
  std::vector<Arc> initial;
  std::vector<Arc> arcs;
  std::vector<Arc> finals;

  int num_states() const { return static_cast<int>(states.size()); }
  // Fewest emitting states on any entry-to-exit path; -1 if none exists.
  int MinFrames() const;
};

// Phone models of `model` in map order; CompositeHmm::State::phone indexes
// into this list.
std::vector<const PhoneHmm*> PhoneOrder(const AcousticModel& model);

// Expands words to phones to HMM states. With optional_silence a skippable
// SIL is placed before, between and after the words. Throws
// OutOfVocabulary, MissingPhoneModel, or InfeasibleAlignment for an empty
// transcript.
CompositeHmm ComposeUtteranceHmm(std::span<const std::string> transcript,
                                 const Lexicon& lexicon, const AcousticModel& model,
                                 bool optional_silence);

struct ForwardBackwardResult {
  double log_likelihood = 0.0;           // forward total
  double backward_log_likelihood = 0.0;  // backward total, same quantity
  int num_frames = 0;
  // T x N posteriors, row-major.
  std::vector<double> gamma;
  // Expected use of each arc of the composite, summed over time.
  std::vector<double> initial_counts;
  std::vector<double> arc_counts;
  std::vector<double> final_counts;
  // log sum_s alpha_t(s) beta_t(s) for every t.
  std::vector<double> alpha_beta_totals;

  double Gamma(int t, int s) const {
    return gamma[static_cast<std::size_t>(t) * (gamma.size() / num_frames) + s];
  }
};

// Log-domain forward-backward. Throws InfeasibleAlignment when no path
// explains the frames.
ForwardBackwardResult ForwardBackward(const CompositeHmm& hmm, const AcousticModel& model,
                                      const FeatureSequence& features);

struct Alignment {
  double log_score = 0.0;
  std::vector<int> states;  // composite state per frame
};

// Best single path through the composite (forced alignment).
Alignment ViterbiAlign(const CompositeHmm& hmm, const AcousticModel& model,
                       const FeatureSequence& features);

// Sufficient statistics of one E-step, laid out like PhoneOrder(model).
struct PhoneStats {
  struct Component {
    double occupancy = 0.0;
    std::vector<double> sum;
    std::vector<double> sum_sq;
  };
  std::vector<std::vector<Component>> states;
  std::vector<double> transitions;  // (S+1) x (S+1)
};

struct Accumulator {
  std::vector<PhoneStats> phones;
  double log_likelihood = 0.0;
  int utterances_used = 0;
  std::vector<std::string> skipped;

  static Accumulator ZerosFor(const AcousticModel& model);
  void Add(const Accumulator& other);
};

// Accumulates statistics of one utterance into acc. Throws
// InfeasibleAlignment.
void AccumulateUtterance(const AcousticModel& model, const CompositeHmm& hmm,
                         const FeatureSequence& features, Accumulator& acc);

// E-step over a corpus: each utterance is accumulated independently and
// the partial results are summed in corpus order, so kSerial and kParallel
// agree bit for bit. Infeasible utterances are listed in `skipped`.
Accumulator EStep(const AcousticModel& model, std::span<const UtteranceExample> corpus,
                  const Lexicon& lexicon, const TrainingConfig& config,
                  Execution execution);

// Maximum-likelihood update with variance flooring. States or rows without
// occupancy keep their previous parameters.
AcousticModel MStep(const AcousticModel& model, const Accumulator& acc,
                    double variance_floor);

// Every state of every phone in the transcripts (plus SIL) gets the global
// frame mean and variance; transitions are 0.5 self-loop / 0.5 advance.
// Throws EmptyCorpus.
AcousticModel FlatStart(std::span<const UtteranceExample> corpus, const Lexicon& lexicon,
                        const TrainingConfig& config, const FrontendConfig& frontend,
                        int sample_rate_hz = kCorpusSampleRateHz);

struct IterationStats {
  int iteration = 0;
  int num_mixtures = 1;
  double log_likelihood = 0.0;
  int utterances_used = 0;
  std::vector<std::string> skipped;
};

// "iter <n> loglik <value> utts_used <k> utts_skipped <m>"
std::string FormatIterationLine(const IterationStats& stats);

using IterationObserver = std::function<void(const IterationStats&, const AcousticModel&)>;

struct TrainingResult {
  AcousticModel model;
  std::vector<IterationStats> trace;
};

// Embedded Baum-Welch from `initial` until the relative log-likelihood
// improvement drops below convergence_rel_tol or max_iterations is hit.
// The corpus is processed in utterance-id order. The observer sees each
// iteration's statistics and the re-estimated model. Throws
// AllUtterancesInfeasible.
TrainingResult BaumWelch(std::span<const UtteranceExample> corpus, const Lexicon& lexicon,
                         const TrainingConfig& config, const AcousticModel& initial,
                         const IterationObserver& observer = {},
                         Execution execution = Execution::kParallel);

// Doubles every mixture: each component becomes two with means moved by
// +/- 0.2 standard deviations and half the weight.
AcousticModel SplitMixtures(const AcousticModel& model);

// FlatStart, BaumWelch, then split-and-retrain until target_mixtures.
TrainingResult TrainModel(std::span<const UtteranceExample> corpus, const Lexicon& lexicon,
                          const TrainingConfig& config, const FrontendConfig& frontend,
                          const IterationObserver& observer = {},
                          Execution execution = Execution::kParallel);

}  // namespace digitspeech

#endif  // DIGITSPEECH_TRAINER_H_
