// src/trainer.cc

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

#include "digitspeech/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "digitspeech/errors.h"
#include "parallel_for.h"

namespace digitspeech {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();
constexpr double kMinOccupancy = 1e-10;
constexpr double kMinWeight = 1e-8;

double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

// Emission scores of the distinct (phone, state) pairs used by a composite,
// frame by frame, with per-component log-likelihoods kept for accumulation.
class EmissionTable {
 public:
  EmissionTable(const CompositeHmm& hmm, const AcousticModel& model,
                const FeatureSequence& features)
      : num_frames_(features.num_frames()) {
    const auto phones = PhoneOrder(model);
    std::map<std::pair<int, int>, int> ids;
    state_to_unique_.resize(hmm.num_states());
    for (int s = 0; s < hmm.num_states(); ++s) {
      const auto key = std::make_pair(hmm.states[s].phone, hmm.states[s].state);
      auto [it, inserted] = ids.emplace(key, static_cast<int>(unique_.size()));
      if (inserted) unique_.push_back(&phones[key.first]->states[key.second]);
      state_to_unique_[s] = it->second;
    }
    offsets_.push_back(0);
    for (const HmmState* st : unique_)
      offsets_.push_back(offsets_.back() + static_cast<int>(st->mixture().size()));
    const int per_frame = offsets_.back();
    component_ll_.resize(static_cast<std::size_t>(num_frames_) * per_frame);
    total_.resize(static_cast<std::size_t>(num_frames_) * unique_.size());
    std::vector<double> scratch;
    for (int t = 0; t < num_frames_; ++t) {
      const auto frame = features.Frame(t);
      for (std::size_t u = 0; u < unique_.size(); ++u) {
        unique_[u]->ComponentLogLikelihoods(frame, scratch);
        double total = kLogZero;
        for (std::size_t m = 0; m < scratch.size(); ++m) {
          component_ll_[static_cast<std::size_t>(t) * per_frame + offsets_[u] + m] = scratch[m];
          total = LogAdd(total, scratch[m]);
        }
        total_[static_cast<std::size_t>(t) * unique_.size() + u] =
            std::max(total, kMinLogDensity);
      }
    }
  }

  double LogB(int t, int composite_state) const {
    return total_[static_cast<std::size_t>(t) * unique_.size() + state_to_unique_[composite_state]];
  }

  std::span<const double> Components(int t, int composite_state) const {
    const int u = state_to_unique_[composite_state];
    const std::size_t base = static_cast<std::size_t>(t) * offsets_.back() + offsets_[u];
    return {component_ll_.data() + base, static_cast<std::size_t>(offsets_[u + 1] - offsets_[u])};
  }

 private:
  int num_frames_;
  std::vector<const HmmState*> unique_;
  std::vector<int> state_to_unique_;
  std::vector<int> offsets_;
  std::vector<double> component_ll_;
  std::vector<double> total_;
};

void CheckFeatureDim(const AcousticModel& model, const FeatureSequence& features) {
  if (features.dim() != model.feature_dim)
    throw Error(ErrorCode::kDimensionMismatch,
                features.source_id() + ": feature dim " + std::to_string(features.dim()) +
                    " but model expects " + std::to_string(model.feature_dim));
}

void CheckFeasible(const CompositeHmm& hmm, const FeatureSequence& features) {
  const int min_frames = hmm.MinFrames();
  if (min_frames < 0 || features.num_frames() < min_frames)
    throw Error(ErrorCode::kInfeasibleAlignment,
                features.source_id() + ": " + std::to_string(features.num_frames()) +
                    " frames, composite needs at least " + std::to_string(min_frames));
}

}  // namespace

void TrainingConfig::Validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (max_iterations < 1) bad("max_iterations must be >= 1");
  if (!(convergence_rel_tol > 0.0)) bad("convergence_rel_tol must be > 0");
  if (!(variance_floor > 0.0)) bad("variance_floor must be > 0");
  if (target_mixtures < 1 || (target_mixtures & (target_mixtures - 1)) != 0)
    bad("target_mixtures must be a power of two");
  if (states_per_phone < 1) bad("states_per_phone must be >= 1");
}

int CompositeHmm::MinFrames() const {
  const int n = num_states();
  std::vector<int> dist(n, -1);
  std::queue<int> queue;
  for (const auto& a : initial)
    if (dist[a.to] < 0) {
      dist[a.to] = 1;
      queue.push(a.to);
    }
  std::vector<std::vector<int>> out(n);
  for (const auto& a : arcs)
    if (a.from != a.to) out[a.from].push_back(a.to);
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop();
    for (int t : out[s])
      if (dist[t] < 0) {
        dist[t] = dist[s] + 1;
        queue.push(t);
      }
  }
  int best = -1;
  for (const auto& a : finals)
    if (dist[a.from] > 0 && (best < 0 || dist[a.from] < best)) best = dist[a.from];
  return best;
}

std::vector<const PhoneHmm*> PhoneOrder(const AcousticModel& model) {
  std::vector<const PhoneHmm*> out;
  out.reserve(model.phones.size());
  for (const auto& [name, hmm] : model.phones) out.push_back(&hmm);
  return out;
}

CompositeHmm ComposeUtteranceHmm(std::span<const std::string> transcript,
                                 const Lexicon& lexicon, const AcousticModel& model,
                                 bool optional_silence) {
  if (transcript.empty())
    throw Error(ErrorCode::kInfeasibleAlignment, "empty transcript");

  std::map<std::string, int, std::less<>> phone_index;
  {
    int i = 0;
    for (const auto& [name, hmm] : model.phones) phone_index.emplace(name, i++);
  }
  auto index_of = [&](std::string_view phone) {
    auto it = phone_index.find(phone);
    if (it == phone_index.end())
      throw Error(ErrorCode::kMissingPhoneModel, "no model for phone '" + std::string(phone) + "'");
    return it->second;
  };

  struct Unit {
    int phone;
    bool optional;
  };
  std::vector<Unit> units;
  int sil = -1;
  if (optional_silence) sil = index_of(kSilencePhone);
  for (const auto& word : transcript) {
    const auto& pron = lexicon.Lookup(word);
    if (optional_silence) units.push_back({sil, true});
    for (const auto& p : pron) units.push_back({index_of(p), false});
  }
  if (optional_silence) units.push_back({sil, true});

  const auto phones = PhoneOrder(model);
  CompositeHmm hmm;
  std::vector<int> first_state(units.size());
  for (std::size_t u = 0; u < units.size(); ++u) {
    first_state[u] = hmm.num_states();
    for (int s = 0; s < phones[units[u].phone]->num_states(); ++s)
      hmm.states.push_back({units[u].phone, s});
  }

  // Entry points reachable when entering at unit `pos` (kNone = exit).
  struct Entry {
    int state;
    double log_prob;
  };
  std::vector<std::vector<Entry>> entries(units.size() + 1);
  entries[units.size()] = {{CompositeHmm::kNone, 0.0}};
  const double log_half = std::log(kOptionalSilenceProb);
  for (int pos = static_cast<int>(units.size()) - 1; pos >= 0; --pos) {
    if (units[pos].optional) {
      entries[pos].push_back({first_state[pos], log_half});
      for (const auto& e : entries[pos + 1]) entries[pos].push_back({e.state, e.log_prob + log_half});
    } else {
      entries[pos].push_back({first_state[pos], 0.0});
    }
  }

  for (const auto& e : entries[0]) {
    if (e.state == CompositeHmm::kNone) continue;  // only possible with no units
    hmm.initial.push_back({CompositeHmm::kNone, e.state, e.log_prob});
  }
  for (std::size_t u = 0; u < units.size(); ++u) {
    const PhoneHmm& ph = *phones[units[u].phone];
    const int n = ph.num_states();
    const int base = first_state[u];
    for (int s = 0; s < n; ++s) {
      hmm.arcs.push_back({base + s, base + s, SafeLog(ph.Transition(s, s)), units[u].phone, s, s});
      if (s + 1 < n)
        hmm.arcs.push_back(
            {base + s, base + s + 1, SafeLog(ph.Transition(s, s + 1)), units[u].phone, s, s + 1});
    }
    const double log_exit = SafeLog(ph.Transition(n - 1, n));
    for (const auto& e : entries[u + 1]) {
      CompositeHmm::Arc arc{base + n - 1, e.state, log_exit + e.log_prob, units[u].phone, n - 1, n};
      if (e.state == CompositeHmm::kNone)
        hmm.finals.push_back(arc);
      else
        hmm.arcs.push_back(arc);
    }
  }
  return hmm;
}

ForwardBackwardResult ForwardBackward(const CompositeHmm& hmm, const AcousticModel& model,
                                      const FeatureSequence& features) {
  CheckFeatureDim(model, features);
  CheckFeasible(hmm, features);
  const int n = hmm.num_states();
  const int frames = features.num_frames();
  const EmissionTable emis(hmm, model, features);

  std::vector<double> alpha(static_cast<std::size_t>(frames) * n, kLogZero);
  std::vector<double> beta(static_cast<std::size_t>(frames) * n, kLogZero);
  auto A = [&](int t, int s) -> double& { return alpha[static_cast<std::size_t>(t) * n + s]; };
  auto B = [&](int t, int s) -> double& { return beta[static_cast<std::size_t>(t) * n + s]; };

  for (const auto& a : hmm.initial) A(0, a.to) = LogAdd(A(0, a.to), a.log_prob);
  for (int s = 0; s < n; ++s)
    if (A(0, s) != kLogZero) A(0, s) += emis.LogB(0, s);
  for (int t = 1; t < frames; ++t) {
    for (const auto& a : hmm.arcs) {
      const double from = A(t - 1, a.from);
      if (from == kLogZero || a.log_prob == kLogZero) continue;
      A(t, a.to) = LogAdd(A(t, a.to), from + a.log_prob);
    }
    for (int s = 0; s < n; ++s)
      if (A(t, s) != kLogZero) A(t, s) += emis.LogB(t, s);
  }
  double total = kLogZero;
  for (const auto& a : hmm.finals) total = LogAdd(total, A(frames - 1, a.from) + a.log_prob);
  if (total == kLogZero || !std::isfinite(total))
    throw Error(ErrorCode::kInfeasibleAlignment, features.source_id() + ": zero likelihood");

  for (const auto& a : hmm.finals) B(frames - 1, a.from) = LogAdd(B(frames - 1, a.from), a.log_prob);
  for (int t = frames - 2; t >= 0; --t) {
    for (const auto& a : hmm.arcs) {
      const double next = B(t + 1, a.to);
      if (next == kLogZero || a.log_prob == kLogZero) continue;
      B(t, a.from) = LogAdd(B(t, a.from), a.log_prob + emis.LogB(t + 1, a.to) + next);
    }
  }
  double backward_total = kLogZero;
  for (const auto& a : hmm.initial)
    backward_total = LogAdd(backward_total, a.log_prob + emis.LogB(0, a.to) + B(0, a.to));

  ForwardBackwardResult r;
  r.log_likelihood = total;
  r.backward_log_likelihood = backward_total;
  r.num_frames = frames;
  r.gamma.assign(static_cast<std::size_t>(frames) * n, 0.0);
  r.alpha_beta_totals.assign(frames, kLogZero);
  for (int t = 0; t < frames; ++t) {
    for (int s = 0; s < n; ++s) {
      const double ab = A(t, s) + B(t, s);
      if (A(t, s) == kLogZero || B(t, s) == kLogZero) continue;
      r.alpha_beta_totals[t] = LogAdd(r.alpha_beta_totals[t], ab);
      r.gamma[static_cast<std::size_t>(t) * n + s] = std::exp(ab - total);
    }
  }

  r.initial_counts.assign(hmm.initial.size(), 0.0);
  for (std::size_t i = 0; i < hmm.initial.size(); ++i) {
    const auto& a = hmm.initial[i];
    if (B(0, a.to) == kLogZero) continue;
    r.initial_counts[i] = std::exp(a.log_prob + emis.LogB(0, a.to) + B(0, a.to) - total);
  }
  r.arc_counts.assign(hmm.arcs.size(), 0.0);
  for (std::size_t i = 0; i < hmm.arcs.size(); ++i) {
    const auto& a = hmm.arcs[i];
    if (a.log_prob == kLogZero) continue;
    double count = 0.0;
    for (int t = 0; t + 1 < frames; ++t) {
      const double from = A(t, a.from), next = B(t + 1, a.to);
      if (from == kLogZero || next == kLogZero) continue;
      count += std::exp(from + a.log_prob + emis.LogB(t + 1, a.to) + next - total);
    }
    r.arc_counts[i] = count;
  }
  r.final_counts.assign(hmm.finals.size(), 0.0);
  for (std::size_t i = 0; i < hmm.finals.size(); ++i) {
    const auto& a = hmm.finals[i];
    if (A(frames - 1, a.from) == kLogZero || a.log_prob == kLogZero) continue;
    r.final_counts[i] = std::exp(A(frames - 1, a.from) + a.log_prob - total);
  }
  return r;
}

Alignment ViterbiAlign(const CompositeHmm& hmm, const AcousticModel& model,
                       const FeatureSequence& features) {
  CheckFeatureDim(model, features);
  CheckFeasible(hmm, features);
  const int n = hmm.num_states();
  const int frames = features.num_frames();
  const EmissionTable emis(hmm, model, features);

  std::vector<std::vector<int>> incoming(n);
  for (int i = 0; i < static_cast<int>(hmm.arcs.size()); ++i) incoming[hmm.arcs[i].to].push_back(i);
  for (auto& list : incoming)
    std::stable_sort(list.begin(), list.end(),
                     [&](int a, int b) { return hmm.arcs[a].from < hmm.arcs[b].from; });

  std::vector<double> delta(n, kLogZero), next(n);
  std::vector<int> back(static_cast<std::size_t>(frames) * n, -1);
  for (const auto& a : hmm.initial) delta[a.to] = std::max(delta[a.to], a.log_prob);
  for (int s = 0; s < n; ++s)
    if (delta[s] != kLogZero) delta[s] += emis.LogB(0, s);
  for (int t = 1; t < frames; ++t) {
    for (int s = 0; s < n; ++s) {
      double best = kLogZero;
      int arg = -1;
      for (int ai : incoming[s]) {
        const auto& a = hmm.arcs[ai];
        if (delta[a.from] == kLogZero || a.log_prob == kLogZero) continue;
        const double v = delta[a.from] + a.log_prob;
        if (v > best) {
          best = v;
          arg = a.from;
        }
      }
      next[s] = best == kLogZero ? kLogZero : best + emis.LogB(t, s);
      back[static_cast<std::size_t>(t) * n + s] = arg;
    }
    std::swap(delta, next);
  }
  double best = kLogZero;
  int last = -1;
  for (int s = 0; s < n; ++s) {
    for (const auto& a : hmm.finals) {
      if (a.from != s || delta[s] == kLogZero || a.log_prob == kLogZero) continue;
      const double v = delta[s] + a.log_prob;
      if (v > best) {
        best = v;
        last = s;
      }
    }
  }
  if (last < 0)
    throw Error(ErrorCode::kInfeasibleAlignment, features.source_id() + ": no path");
  Alignment out;
  out.log_score = best;
  out.states.resize(frames);
  out.states[frames - 1] = last;
  for (int t = frames - 1; t > 0; --t)
    out.states[t - 1] = back[static_cast<std::size_t>(t) * n + out.states[t]];
  return out;
}

Accumulator Accumulator::ZerosFor(const AcousticModel& model) {
  Accumulator acc;
  for (const PhoneHmm* ph : PhoneOrder(model)) {
    PhoneStats ps;
    for (const auto& st : ph->states) {
      std::vector<PhoneStats::Component> comps(st.mixture().size());
      for (auto& c : comps) {
        c.sum.assign(model.feature_dim, 0.0);
        c.sum_sq.assign(model.feature_dim, 0.0);
      }
      ps.states.push_back(std::move(comps));
    }
    ps.transitions.assign(ph->transitions.size(), 0.0);
    acc.phones.push_back(std::move(ps));
  }
  return acc;
}

void Accumulator::Add(const Accumulator& other) {
  for (std::size_t p = 0; p < phones.size(); ++p) {
    auto& mine = phones[p];
    const auto& theirs = other.phones[p];
    for (std::size_t s = 0; s < mine.states.size(); ++s)
      for (std::size_t m = 0; m < mine.states[s].size(); ++m) {
        auto& a = mine.states[s][m];
        const auto& b = theirs.states[s][m];
        a.occupancy += b.occupancy;
        for (std::size_t d = 0; d < a.sum.size(); ++d) {
          a.sum[d] += b.sum[d];
          a.sum_sq[d] += b.sum_sq[d];
        }
      }
    for (std::size_t i = 0; i < mine.transitions.size(); ++i)
      mine.transitions[i] += theirs.transitions[i];
  }
  log_likelihood += other.log_likelihood;
  utterances_used += other.utterances_used;
  skipped.insert(skipped.end(), other.skipped.begin(), other.skipped.end());
}

void AccumulateUtterance(const AcousticModel& model, const CompositeHmm& hmm,
                         const FeatureSequence& features, Accumulator& acc) {
  const auto fb = ForwardBackward(hmm, model, features);
  const EmissionTable emis(hmm, model, features);
  const int n = hmm.num_states();
  const int dim = model.feature_dim;
  for (int t = 0; t < fb.num_frames; ++t) {
    const auto x = features.Frame(t);
    for (int s = 0; s < n; ++s) {
      const double g = fb.gamma[static_cast<std::size_t>(t) * n + s];
      if (g <= 0.0) continue;
      const auto comps = emis.Components(t, s);
      const double log_b = emis.LogB(t, s);
      auto& stats = acc.phones[hmm.states[s].phone].states[hmm.states[s].state];
      for (std::size_t m = 0; m < comps.size(); ++m) {
        const double w = g * std::exp(comps[m] - log_b);
        if (w <= 0.0) continue;
        auto& c = stats[m];
        c.occupancy += w;
        for (int d = 0; d < dim; ++d) {
          c.sum[d] += w * x[d];
          c.sum_sq[d] += w * x[d] * x[d];
        }
      }
    }
  }
  auto add_count = [&](const CompositeHmm::Arc& a, double count) {
    if (a.phone == CompositeHmm::kNone) return;
    auto& ps = acc.phones[a.phone];
    const int width = static_cast<int>(ps.states.size()) + 1;
    ps.transitions[static_cast<std::size_t>(a.row) * width + a.col] += count;
  };
  for (std::size_t i = 0; i < hmm.arcs.size(); ++i) add_count(hmm.arcs[i], fb.arc_counts[i]);
  for (std::size_t i = 0; i < hmm.finals.size(); ++i) add_count(hmm.finals[i], fb.final_counts[i]);
  acc.log_likelihood += fb.log_likelihood;
  acc.utterances_used += 1;
}

Accumulator EStep(const AcousticModel& model, std::span<const UtteranceExample> corpus,
                  const Lexicon& lexicon, const TrainingConfig& config,
                  Execution execution) {
  std::vector<Accumulator> partial(corpus.size());
  ParallelFor(corpus.size(), execution, [&](std::size_t i) {
    Accumulator acc = Accumulator::ZerosFor(model);
    try {
      const auto hmm = ComposeUtteranceHmm(corpus[i].transcript, lexicon, model,
                                           config.add_optional_silence);
      AccumulateUtterance(model, hmm, corpus[i].features, acc);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfeasibleAlignment) throw;
      acc = Accumulator::ZerosFor(model);
      acc.skipped.push_back(corpus[i].id);
    }
    partial[i] = std::move(acc);
  });
  Accumulator total = Accumulator::ZerosFor(model);
  for (const auto& p : partial) total.Add(p);
  return total;
}

AcousticModel MStep(const AcousticModel& model, const Accumulator& acc,
                    double variance_floor) {
  AcousticModel out = model;
  std::size_t p = 0;
  for (auto& [name, hmm] : out.phones) {
    const PhoneStats& ps = acc.phones[p++];
    const int n = hmm.num_states();
    for (int s = 0; s < n; ++s) {
      const auto& old_mix = hmm.states[s].mixture();
      const auto& comp_stats = ps.states[s];
      double state_occ = 0.0;
      for (const auto& c : comp_stats) state_occ += c.occupancy;
      if (state_occ < kMinOccupancy) continue;

      std::vector<GaussianComponent> mix = old_mix;
      double weight_sum = 0.0;
      for (std::size_t m = 0; m < mix.size(); ++m) {
        const auto& c = comp_stats[m];
        if (c.occupancy >= kMinOccupancy) {
          for (int d = 0; d < out.feature_dim; ++d) {
            const double mean = c.sum[d] / c.occupancy;
            const double var = c.sum_sq[d] / c.occupancy - mean * mean;
            mix[m].mean[d] = mean;
            mix[m].variance[d] = std::max(var, variance_floor);
          }
        }
        mix[m].weight = std::max(c.occupancy / state_occ, kMinWeight);
        weight_sum += mix[m].weight;
      }
      for (auto& g : mix) g.weight /= weight_sum;
      hmm.states[s] = HmmState(std::move(mix));
    }
    for (int i = 0; i < n; ++i) {
      const double stay = ps.transitions[static_cast<std::size_t>(i) * (n + 1) + i];
      const double move = ps.transitions[static_cast<std::size_t>(i) * (n + 1) + i + 1];
      const double row = stay + move;
      if (row < kMinOccupancy) continue;
      hmm.Transition(i, i) = stay / row;
      hmm.Transition(i, i + 1) = move / row;
    }
  }
  return out;
}

AcousticModel FlatStart(std::span<const UtteranceExample> corpus, const Lexicon& lexicon,
                        const TrainingConfig& config, const FrontendConfig& frontend,
                        int sample_rate_hz) {
  config.Validate();
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training utterances");
  const int dim = corpus.front().features.dim();
  std::vector<double> sum(dim, 0.0), sum_sq(dim, 0.0);
  long count = 0;
  std::set<std::string> used{std::string(kSilencePhone)};
  for (const auto& u : corpus) {
    if (u.features.dim() != dim)
      throw Error(ErrorCode::kDimensionMismatch, u.id + ": inconsistent feature dim");
    for (int t = 0; t < u.features.num_frames(); ++t) {
      const auto x = u.features.Frame(t);
      for (int d = 0; d < dim; ++d) {
        sum[d] += x[d];
        sum_sq[d] += x[d] * x[d];
      }
      ++count;
    }
    for (const auto& w : u.transcript)
      for (const auto& p : lexicon.Lookup(w)) used.insert(p);
  }
  if (count == 0) throw Error(ErrorCode::kEmptyCorpus, "corpus has no frames");

  GaussianComponent global;
  global.weight = 1.0;
  global.mean.resize(dim);
  global.variance.resize(dim);
  for (int d = 0; d < dim; ++d) {
    global.mean[d] = sum[d] / count;
    global.variance[d] =
        std::max(sum_sq[d] / count - global.mean[d] * global.mean[d], config.variance_floor);
  }

  AcousticModel model;
  model.feature_dim = dim;
  model.sample_rate_hz = sample_rate_hz;
  model.frontend = frontend;
  for (const auto& phone : used) {
    PhoneHmm hmm;
    hmm.phone = phone;
    for (int s = 0; s < config.states_per_phone; ++s) hmm.states.emplace_back(std::vector{global});
    hmm.transitions = LeftToRightTransitions(config.states_per_phone, 0.5);
    model.phones.emplace(phone, std::move(hmm));
  }
  return model;
}

std::string FormatIterationLine(const IterationStats& stats) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "iter %d loglik %.6f utts_used %d utts_skipped %zu",
                stats.iteration, stats.log_likelihood, stats.utterances_used,
                stats.skipped.size());
  return buf;
}

TrainingResult BaumWelch(std::span<const UtteranceExample> corpus, const Lexicon& lexicon,
                         const TrainingConfig& config, const AcousticModel& initial,
                         const IterationObserver& observer, Execution execution) {
  config.Validate();
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training utterances");

  std::vector<UtteranceExample> sorted;
  auto by_id = [](const UtteranceExample& a, const UtteranceExample& b) { return a.id < b.id; };
  if (!std::is_sorted(corpus.begin(), corpus.end(), by_id)) {
    sorted.assign(corpus.begin(), corpus.end());
    std::stable_sort(sorted.begin(), sorted.end(), by_id);
    corpus = sorted;
  }

  int mixtures = 1;
  for (const auto& [name, hmm] : initial.phones)
    for (const auto& st : hmm.states)
      mixtures = std::max(mixtures, static_cast<int>(st.mixture().size()));

  TrainingResult result{initial, {}};
  double previous = 0.0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const Accumulator acc = EStep(result.model, corpus, lexicon, config, execution);
    if (acc.utterances_used == 0)
      throw Error(ErrorCode::kAllUtterancesInfeasible,
                  "all " + std::to_string(corpus.size()) + " utterances are infeasible");
    result.model = MStep(result.model, acc, config.variance_floor);

    IterationStats stats;
    stats.iteration = it;
    stats.num_mixtures = mixtures;
    stats.log_likelihood = acc.log_likelihood;
    stats.utterances_used = acc.utterances_used;
    stats.skipped = acc.skipped;
    result.trace.push_back(stats);
    if (observer) observer(stats, result.model);

    if (it > 1) {
      const double improvement = (acc.log_likelihood - previous) / std::abs(previous);
      if (improvement < config.convergence_rel_tol) break;
    }
    previous = acc.log_likelihood;
  }
  return result;
}

AcousticModel SplitMixtures(const AcousticModel& model) {
  AcousticModel out = model;
  for (auto& [name, hmm] : out.phones) {
    for (auto& st : hmm.states) {
      std::vector<GaussianComponent> mix;
      for (const auto& g : st.mixture()) {
        GaussianComponent up = g, down = g;
        up.weight = down.weight = g.weight / 2.0;
        for (std::size_t d = 0; d < g.mean.size(); ++d) {
          const double offset = 0.2 * std::sqrt(g.variance[d]);
          up.mean[d] += offset;
          down.mean[d] -= offset;
        }
        mix.push_back(std::move(up));
        mix.push_back(std::move(down));
      }
      st = HmmState(std::move(mix));
    }
  }
  return out;
}

TrainingResult TrainModel(std::span<const UtteranceExample> corpus, const Lexicon& lexicon,
                          const TrainingConfig& config, const FrontendConfig& frontend,
                          const IterationObserver& observer, Execution execution) {
  const AcousticModel initial = FlatStart(corpus, lexicon, config, frontend);
  TrainingResult result = BaumWelch(corpus, lexicon, config, initial, observer, execution);
  for (int mixtures = 2; mixtures <= config.target_mixtures; mixtures *= 2) {
    const int offset = static_cast<int>(result.trace.size());
    auto stage = BaumWelch(
        corpus, lexicon, config, SplitMixtures(result.model),
        [&](const IterationStats& s, const AcousticModel& m) {
          if (!observer) return;
          IterationStats shifted = s;
          shifted.iteration += offset;
          observer(shifted, m);
        },
        execution);
    for (auto& s : stage.trace) {
      s.iteration += offset;
      result.trace.push_back(std::move(s));
    }
    result.model = std::move(stage.model);
  }
  return result;
}

}  // namespace digitspeech
