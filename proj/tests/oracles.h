// tests/oracles.h

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

// Straight-line reference implementations used only by the tests. None of
// them calls into the library's numeric code; they share only the plain
// data types (AcousticModel, WordFsa, ...).
#ifndef DIGITSPEECH_TESTS_ORACLES_H_
#define DIGITSPEECH_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "digitspeech/acoustic_model.h"
#include "digitspeech/grammar.h"
#include "digitspeech/lexicon.h"

namespace oracle {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// |X_k|^2 for k = 0..n/2 by the defining sum.
inline std::vector<double> NaivePowerSpectrum(const std::vector<double>& frame, int n) {
  std::vector<double> cos_table(n), sin_table(n);
  for (int j = 0; j < n; ++j) {
    cos_table[j] = std::cos(2.0 * std::numbers::pi * j / n);
    sin_table[j] = std::sin(2.0 * std::numbers::pi * j / n);
  }
  std::vector<double> out(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < frame.size(); ++t) {
      const int j = static_cast<int>((static_cast<long>(k) * static_cast<long>(t)) % n);
      re += frame[t] * cos_table[j];
      im -= frame[t] * sin_table[j];
    }
    out[k] = re * re + im * im;
  }
  return out;
}

struct MfccParams {
  int sample_rate = 16000;
  int frame_len = 400;
  int shift = 160;
  double preemph = 0.97;
  int filters = 26;
  int ceps = 13;
  int fft = 512;
  double low_hz = 0.0;
  double high_hz = 8000.0;
  bool deltas = true;
};

inline double Mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double InvMel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Explicit triangle weight of filter m at frequency f.
inline double Triangle(const MfccParams& p, int m, double f) {
  auto point = [&](int i) {
    return InvMel(Mel(p.low_hz) + i * (Mel(p.high_hz) - Mel(p.low_hz)) / (p.filters + 1));
  };
  const double l = point(m), c = point(m + 1), r = point(m + 2);
  if (f > l && f < c) return (f - l) / (c - l);
  if (f >= c && f < r) return (r - f) / (r - c);
  return 0.0;
}

// Returns frames x dim, row-major by frame.
inline std::vector<std::vector<double>> NaiveMfcc(const std::vector<double>& x,
                                                  const MfccParams& p) {
  std::vector<double> y(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) y[n] = x[n] - (n > 0 ? p.preemph * x[n - 1] : 0.0);
  const int frames =
      x.size() < static_cast<std::size_t>(p.frame_len)
          ? 0
          : static_cast<int>((x.size() - p.frame_len) / p.shift) + 1;

  std::vector<std::vector<double>> ceps(frames, std::vector<double>(p.ceps));
  for (int t = 0; t < frames; ++t) {
    std::vector<double> frame(p.frame_len);
    for (int n = 0; n < p.frame_len; ++n) {
      const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (p.frame_len - 1));
      frame[n] = y[static_cast<std::size_t>(t) * p.shift + n] * w;
    }
    const auto power = NaivePowerSpectrum(frame, p.fft);
    std::vector<double> logmel(p.filters);
    for (int m = 0; m < p.filters; ++m) {
      double e = 0.0;
      for (int k = 0; k <= p.fft / 2; ++k)
        e += Triangle(p, m, k * static_cast<double>(p.sample_rate) / p.fft) * power[k];
      logmel[m] = std::log(e < 1e-10 ? 1e-10 : e);
    }
    for (int k = 0; k < p.ceps; ++k) {
      double s = 0.0;
      for (int m = 0; m < p.filters; ++m)
        s += logmel[m] * std::cos(std::numbers::pi * k * (m + 0.5) / p.filters);
      ceps[t][k] = s * std::sqrt((k == 0 ? 1.0 : 2.0) / p.filters);
    }
  }
  if (!p.deltas) return ceps;

  auto regress = [&](const std::vector<std::vector<double>>& v) {
    std::vector<std::vector<double>> d(frames, std::vector<double>(p.ceps));
    auto at = [&](int t, int k) { return v[std::min(std::max(t, 0), frames - 1)][k]; };
    for (int t = 0; t < frames; ++t)
      for (int k = 0; k < p.ceps; ++k)
        d[t][k] = (1.0 * (at(t + 1, k) - at(t - 1, k)) + 2.0 * (at(t + 2, k) - at(t - 2, k))) / 10.0;
    return d;
  };
  const auto d1 = regress(ceps);
  const auto d2 = regress(d1);
  std::vector<std::vector<double>> out(frames);
  for (int t = 0; t < frames; ++t) {
    out[t] = ceps[t];
    out[t].insert(out[t].end(), d1[t].begin(), d1[t].end());
    out[t].insert(out[t].end(), d2[t].begin(), d2[t].end());
  }
  return out;
}

// Mixture density evaluated in the linear domain.
inline double GmmDensity(const digitspeech::HmmState& state, const double* x) {
  double total = 0.0;
  for (const auto& c : state.mixture()) {
    double p = c.weight;
    for (std::size_t d = 0; d < c.mean.size(); ++d) {
      const double diff = x[d] - c.mean[d];
      p *= std::exp(-0.5 * diff * diff / c.variance[d]) /
           std::sqrt(2.0 * std::numbers::pi * c.variance[d]);
    }
    total += p;
  }
  return total;
}

// One emitting state of a linear chain, with its outgoing probabilities.
struct ChainState {
  const digitspeech::HmmState* emission = nullptr;
  double self_loop = 0.0;
  double advance = 0.0;  // to the next chain state, or out of the chain
};

// Phone models of `phones` laid end to end.
inline std::vector<ChainState> BuildChain(const digitspeech::AcousticModel& model,
                                          const std::vector<std::string>& phones) {
  std::vector<ChainState> chain;
  for (const auto& name : phones) {
    const auto& hmm = model.phones.at(name);
    const int n = hmm.num_states();
    for (int s = 0; s < n; ++s) {
      const std::size_t row = static_cast<std::size_t>(s) * (n + 1);
      chain.push_back({&hmm.states[s], hmm.transitions[row + s], hmm.transitions[row + s + 1]});
    }
  }
  return chain;
}

struct PathResult {
  double log_total = kNegInf;  // log sum over all paths
  double log_best = kNegInf;   // log max over all paths
  std::vector<int> best_path;
  // occupancy[t][s]: posterior probability of being in s at frame t.
  std::vector<std::vector<double>> occupancy;
};

// Enumerates all num_states^T state sequences of a chain entered at state 0
// and left from its last state after frame T-1. Features are T x dim.
inline PathResult EnumerateChainPaths(const std::vector<ChainState>& chain,
                                      const std::vector<std::vector<double>>& features) {
  const int n = static_cast<int>(chain.size());
  const int frames = static_cast<int>(features.size());
  auto trans = [&](int from, int to) {
    if (to == from) return chain[from].self_loop;
    if (to == from + 1) return chain[from].advance;
    return 0.0;
  };
  PathResult result;
  result.occupancy.assign(frames, std::vector<double>(n, 0.0));
  double mass = 0.0;
  std::vector<int> path(frames, 0);
  long total = 1;
  for (int t = 0; t < frames; ++t) total *= n;
  for (long code = 0; code < total; ++code) {
    long c = code;
    for (int t = 0; t < frames; ++t) {
      path[t] = static_cast<int>(c % n);
      c /= n;
    }
    if (path[0] != 0 || path[frames - 1] != n - 1) continue;
    double p = chain[n - 1].advance;
    for (int t = 0; t < frames && p > 0.0; ++t) {
      p *= GmmDensity(*chain[path[t]].emission, features[t].data());
      if (t > 0) p *= trans(path[t - 1], path[t]);
    }
    if (p <= 0.0) continue;
    mass += p;
    for (int t = 0; t < frames; ++t) result.occupancy[t][path[t]] += p;
    const double lp = std::log(p);
    result.log_total = LogAdd(result.log_total, lp);
    if (lp > result.log_best) {
      result.log_best = lp;
      result.best_path = path;
    }
  }
  for (auto& row : result.occupancy)
    for (auto& v : row) v /= mass;
  return result;
}

// Best score of a chain over exactly `frames` frames by trying every
// duration split (each state used at least once, in order).
inline double BestChainScore(const std::vector<ChainState>& chain,
                             const std::vector<std::vector<double>>& features) {
  const int n = static_cast<int>(chain.size());
  const int frames = static_cast<int>(features.size());
  if (n > frames || n == 0) return kNegInf;
  double best = kNegInf;
  std::vector<int> dur(n, 1);
  std::function<void(int, int)> split = [&](int state, int left) {
    if (state == n - 1) {
      dur[state] = left;
      double lp = 0.0;
      int t = 0;
      for (int s = 0; s < n; ++s) {
        for (int k = 0; k < dur[s]; ++k, ++t) {
          lp += std::log(GmmDensity(*chain[s].emission, features[t].data()));
          if (k > 0) lp += std::log(chain[s].self_loop);
        }
        lp += std::log(chain[s].advance);
      }
      best = std::max(best, lp);
      return;
    }
    for (int d = 1; d <= left - (n - 1 - state); ++d) {
      dur[state] = d;
      split(state + 1, left - d);
    }
  };
  split(0, frames);
  return best;
}

struct DecodeResult {
  double log_score = kNegInf;
  std::vector<std::string> words;
};

// Exhaustive decode: every FSA path of at most `frames` words, every
// optional-silence choice at each visited grammar state (probability 1/2
// each way), every duration split. Word entries cost -log(out-degree of
// the source state) plus the insertion penalty.
inline DecodeResult BruteForceDecode(const digitspeech::WordFsa& fsa,
                                     const digitspeech::Lexicon& lexicon,
                                     const digitspeech::AcousticModel& model,
                                     const std::vector<std::vector<double>>& features,
                                     bool optional_silence, double wip = 0.0) {
  const int frames = static_cast<int>(features.size());
  std::vector<int> out_degree(fsa.num_states, 0);
  for (const auto& e : fsa.edges) ++out_degree[e.from];

  DecodeResult best;
  std::vector<std::string> words;
  // Units are phone lists: SIL slots are separate entries flagged optional.
  struct Unit {
    std::vector<std::string> phones;
    bool optional;
  };
  std::vector<Unit> units;

  auto score_units = [&](double grammar_log) {
    const int num_optional = static_cast<int>(
        std::count_if(units.begin(), units.end(), [](const Unit& u) { return u.optional; }));
    for (int mask = 0; mask < (1 << num_optional); ++mask) {
      std::vector<ChainState> chain;
      double lp = grammar_log + num_optional * std::log(0.5);
      int bit = 0;
      for (const auto& u : units) {
        if (u.optional && !((mask >> bit++) & 1)) continue;
        auto part = BuildChain(model, u.phones);
        chain.insert(chain.end(), part.begin(), part.end());
      }
      const double s = lp + BestChainScore(chain, features);
      if (s > best.log_score) {
        best.log_score = s;
        best.words = words;
      }
    }
  };

  std::function<void(int, double)> walk = [&](int q, double grammar_log) {
    if (optional_silence) units.push_back({{std::string(digitspeech::kSilencePhone)}, true});
    if (fsa.is_final[q]) score_units(grammar_log);
    if (static_cast<int>(words.size()) < frames) {
      for (const auto& e : fsa.edges) {
        if (e.from != q) continue;
        words.push_back(e.word);
        units.push_back({lexicon.Lookup(e.word), false});
        walk(e.to, grammar_log - std::log(static_cast<double>(out_degree[q])) + wip);
        units.pop_back();
        words.pop_back();
      }
    }
    if (optional_silence) units.pop_back();
  };
  walk(fsa.start, 0.0);
  return best;
}

// Membership in a word-level language given as a std::regex over the
// words, each followed by one space ("1 2 " for [1, 2]).
inline bool RegexAccepts(const std::regex& re, const std::vector<std::string>& words) {
  std::string joined;
  for (const auto& w : words) joined += w + ' ';
  return std::regex_match(joined, re);
}

// Word-sequence membership by simulating an FSA that may contain epsilon
// edges, taking epsilon closures explicitly.
inline bool EpsilonAccepts(const digitspeech::WordFsa& fsa, const std::vector<std::string>& words) {
  auto closure = [&](std::set<int> states) {
    std::vector<int> stack(states.begin(), states.end());
    while (!stack.empty()) {
      const int q = stack.back();
      stack.pop_back();
      for (const auto& e : fsa.edges)
        if (e.from == q && e.word.empty() && states.insert(e.to).second) stack.push_back(e.to);
    }
    return states;
  };
  std::set<int> current = closure({fsa.start});
  for (const auto& w : words) {
    std::set<int> next;
    for (const auto& e : fsa.edges)
      if (current.count(e.from) && e.word == w) next.insert(e.to);
    current = closure(next);
    if (current.empty()) return false;
  }
  for (int q : current)
    if (fsa.is_final[q]) return true;
  return false;
}

}  // namespace oracle

#endif  // DIGITSPEECH_TESTS_ORACLES_H_
