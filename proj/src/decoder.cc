// src/decoder.cc

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

#include "digitspeech/decoder.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "digitspeech/errors.h"
#include "parallel_for.h"

namespace digitspeech {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

std::string FormatScore(double v) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << v;
  return out.str();
}

class GraphBuilder {
 public:
  GraphBuilder(const Lexicon& lexicon, const AcousticModel& model)
      : lexicon_(lexicon), model_(model) {}

  int AddNode(SearchGraph::NodeKind kind) {
    graph_.nodes.push_back({kind, -1, -1, -1});
    return static_cast<int>(graph_.nodes.size()) - 1;
  }

  void AddArc(int from, int to, double log_prob) {
    if (log_prob == kLogZero) return;
    graph_.arcs.push_back({from, to, log_prob});
  }

  int Senone(const std::string& phone, int state) {
    auto [it, inserted] =
        senone_ids_.emplace(std::make_pair(phone, state), static_cast<int>(graph_.senones.size()));
    if (inserted) graph_.senones.push_back({phone, state});
    return it->second;
  }

  const PhoneHmm& Model(const std::string& phone) {
    const PhoneHmm* hmm = model_.Find(phone);
    if (!hmm) throw Error(ErrorCode::kMissingPhoneModel, "no model for phone '" + phone + "'");
    return *hmm;
  }

  // Emits a chain of phone HMMs entered from `entry` with entry_log_prob and
  // leaving into `exit`. Returns nothing; all arcs are added directly.
  void AddChain(const std::vector<std::string>& phones, int word, int entry,
                double entry_log_prob, int exit) {
    int prev_last = -1;
    double prev_exit = 0.0;
    for (const auto& phone : phones) {
      const PhoneHmm& hmm = Model(phone);
      const int n = hmm.num_states();
      std::vector<int> ids(n);
      for (int s = 0; s < n; ++s) {
        ids[s] = AddNode(SearchGraph::NodeKind::kEmitting);
        graph_.nodes[ids[s]].senone = Senone(phone, s);
        graph_.nodes[ids[s]].word = word;
      }
      if (prev_last < 0)
        AddArc(entry, ids[0], entry_log_prob);
      else
        AddArc(prev_last, ids[0], prev_exit);
      for (int s = 0; s < n; ++s) {
        AddArc(ids[s], ids[s], SafeLog(hmm.Transition(s, s)));
        if (s + 1 < n) AddArc(ids[s], ids[s + 1], SafeLog(hmm.Transition(s, s + 1)));
      }
      prev_last = ids[n - 1];
      prev_exit = SafeLog(hmm.Transition(n - 1, n));
    }
    AddArc(prev_last, exit, prev_exit);
  }

  SearchGraph Build(const WordFsa& fsa, bool optional_silence, double wip) {
    if (fsa.HasEpsilons())
      throw Error(ErrorCode::kUnsupportedFeature, "search graph needs an epsilon-free FSA");
    for (const auto& w : fsa.Terminals()) {
      for (const auto& p : lexicon_.Lookup(w)) Model(p);
    }
    if (optional_silence) Model(std::string(kSilencePhone));

    graph_.start = AddNode(SearchGraph::NodeKind::kStart);
    std::vector<int> g_in(fsa.num_states), g_out(fsa.num_states);
    for (int q = 0; q < fsa.num_states; ++q) {
      g_in[q] = AddNode(SearchGraph::NodeKind::kGrammarIn);
      g_out[q] = AddNode(SearchGraph::NodeKind::kGrammarOut);
      graph_.nodes[g_in[q]].fsa_state = q;
      graph_.nodes[g_out[q]].fsa_state = q;
    }
    graph_.final = AddNode(SearchGraph::NodeKind::kFinal);
    AddArc(graph_.start, g_in[fsa.start], 0.0);

    const std::vector<std::string> sil{std::string(kSilencePhone)};
    const double log_half = std::log(0.5);
    std::vector<int> out_degree(fsa.num_states, 0);
    for (const auto& e : fsa.edges) ++out_degree[e.from];

    std::map<std::string, int> word_ids;
    for (int q = 0; q < fsa.num_states; ++q) {
      if (optional_silence) {
        AddArc(g_in[q], g_out[q], log_half);
        AddChain(sil, -1, g_in[q], log_half, g_out[q]);
      } else {
        AddArc(g_in[q], g_out[q], 0.0);
      }
      if (fsa.is_final[q]) AddArc(g_out[q], graph_.final, 0.0);
    }
    for (const auto& e : fsa.edges) {
      auto [it, inserted] = word_ids.emplace(e.word, static_cast<int>(graph_.words.size()));
      if (inserted) graph_.words.push_back(e.word);
      const int word = it->second;
      const int word_end = AddNode(SearchGraph::NodeKind::kWordEnd);
      graph_.nodes[word_end].word = word;
      const double entry = -std::log(static_cast<double>(out_degree[e.from])) + wip;
      AddChain(lexicon_.Lookup(e.word), word, g_out[e.from], entry, word_end);
      AddArc(word_end, g_in[e.to], 0.0);
    }
    Finish();
    return std::move(graph_);
  }

 private:
  void Finish() {
    auto& g = graph_;
    std::stable_sort(g.arcs.begin(), g.arcs.end(), [](const auto& a, const auto& b) {
      return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
    const int n = static_cast<int>(g.nodes.size());
    g.arc_begin.assign(n + 1, 0);
    for (const auto& a : g.arcs) ++g.arc_begin[a.from + 1];
    for (int i = 0; i < n; ++i) g.arc_begin[i + 1] += g.arc_begin[i];

    // Topological order of the non-emitting sub-graph.
    std::vector<int> indegree(n, 0);
    for (const auto& a : g.arcs)
      if (!g.IsEmitting(a.from) && !g.IsEmitting(a.to)) ++indegree[a.to];
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    int non_emitting = 0;
    for (int v = 0; v < n; ++v)
      if (!g.IsEmitting(v)) {
        ++non_emitting;
        if (indegree[v] == 0) ready.push(v);
      }
    while (!ready.empty()) {
      const int v = ready.top();
      ready.pop();
      g.epsilon_order.push_back(v);
      for (const auto& a : g.OutArcs(v))
        if (!g.IsEmitting(a.to) && --indegree[a.to] == 0) ready.push(a.to);
    }
    if (static_cast<int>(g.epsilon_order.size()) != non_emitting)
      throw Error(ErrorCode::kUnsupportedFeature, "non-emitting cycle in search graph");

    std::vector<bool> seen(n, false);
    std::vector<int> stack{g.start};
    seen[g.start] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& a : g.OutArcs(v))
        if (!seen[a.to]) {
          seen[a.to] = true;
          stack.push_back(a.to);
        }
    }
    if (!seen[g.final])
      throw Error(ErrorCode::kNoSurvivingPath, "grammar accepts no word sequence");
  }

  const Lexicon& lexicon_;
  const AcousticModel& model_;
  SearchGraph graph_;
  std::map<std::pair<std::string, int>, int> senone_ids_;
};

}  // namespace

void DecoderConfig::Validate() const {
  if (!(beam_width_log > 0.0))
    throw Error(ErrorCode::kInvalidConfig, "beam_width_log must be > 0");
  if (max_active < 1) throw Error(ErrorCode::kInvalidConfig, "max_active must be >= 1");
}

SearchGraph::Stats SearchGraph::ComputeStats() const {
  Stats s;
  s.nodes = static_cast<int>(nodes.size());
  s.arcs = static_cast<int>(arcs.size());
  s.senones = static_cast<int>(senones.size());
  for (const auto& n : nodes) {
    switch (n.kind) {
      case NodeKind::kEmitting: ++s.emitting; break;
      case NodeKind::kWordEnd: ++s.word_ends; break;
      case NodeKind::kGrammarIn:
      case NodeKind::kGrammarOut: ++s.grammar; break;
      default: break;
    }
  }
  return s;
}

SearchGraph BuildSearchGraph(const WordFsa& fsa, const Lexicon& lexicon,
                             const AcousticModel& model, bool optional_silence,
                             double word_insertion_penalty_log) {
  return GraphBuilder(lexicon, model).Build(fsa, optional_silence, word_insertion_penalty_log);
}

Hypothesis ViterbiDecode(const SearchGraph& graph, const AcousticModel& model,
                         const FeatureSequence& features, const DecoderConfig& config) {
  config.Validate();
  if (features.dim() != model.feature_dim)
    throw Error(ErrorCode::kDimensionMismatch,
                features.source_id() + ": feature dim " + std::to_string(features.dim()) +
                    " but model expects " + std::to_string(model.feature_dim));
  const int frames = features.num_frames();
  if (frames == 0) throw Error(ErrorCode::kTooShort, features.source_id() + ": no frames");

  std::vector<const HmmState*> senones;
  for (const auto& s : graph.senones) {
    const PhoneHmm* hmm = model.Find(s.phone);
    if (!hmm || s.state >= hmm->num_states())
      throw Error(ErrorCode::kMissingPhoneModel,
                  "graph state " + s.phone + "/" + std::to_string(s.state) + " not in model");
    senones.push_back(&hmm->states[s.state]);
  }

  const int n = static_cast<int>(graph.nodes.size());
  // Layer L holds scores after frame L-1; layer 0 is before the first frame.
  std::vector<int> back(static_cast<std::size_t>(frames + 1) * n, -1);
  std::vector<double> prev(n, kLogZero), cur(n, kLogZero);
  std::vector<double> emission(graph.senones.size());
  std::vector<int> emission_stamp(graph.senones.size(), -1);
  std::vector<int> active, next_active;

  auto relax = [&](std::vector<double>& score, int* bp, int from, int to, double value) {
    if (value > score[to] || (value == score[to] && value != kLogZero && from < bp[to])) {
      score[to] = value;
      bp[to] = from;
    }
  };
  // Non-emitting closure of one layer. Emitting sources are pushed first
  // (in ascending order), then non-emitting nodes in topological order.
  auto closure = [&](std::vector<double>& score, int* bp, const std::vector<int>& sources) {
    for (int v : sources)
      for (const auto& a : graph.OutArcs(v))
        if (!graph.IsEmitting(a.to)) relax(score, bp, v, a.to, score[v] + a.log_prob);
    for (int v : graph.epsilon_order) {
      if (score[v] == kLogZero) continue;
      for (const auto& a : graph.OutArcs(v))
        if (!graph.IsEmitting(a.to)) relax(score, bp, v, a.to, score[v] + a.log_prob);
    }
  };

  prev[graph.start] = 0.0;
  closure(prev, back.data(), {});

  for (int t = 0; t < frames; ++t) {
    std::fill(cur.begin(), cur.end(), kLogZero);
    int* bp = back.data() + static_cast<std::size_t>(t + 1) * n;
    const auto frame = features.Frame(t);

    // Sources: surviving emitting nodes of the previous frame plus every
    // reached non-emitting node, in ascending index order.
    std::vector<int> sources;
    for (int v = 0; v < n; ++v)
      if (prev[v] != kLogZero) sources.push_back(v);
    next_active.clear();
    for (int v : sources) {
      for (const auto& a : graph.OutArcs(v)) {
        if (!graph.IsEmitting(a.to)) continue;
        const double value = prev[v] + a.log_prob;
        if (cur[a.to] == kLogZero) next_active.push_back(a.to);
        relax(cur, bp, v, a.to, value);
      }
    }
    double best = kLogZero;
    for (int v : next_active) {
      const int s = graph.nodes[v].senone;
      if (emission_stamp[s] != t) {
        emission[s] = senones[s]->LogEmission(frame);
        emission_stamp[s] = t;
      }
      cur[v] += emission[s];
      best = std::max(best, cur[v]);
    }
    std::sort(next_active.begin(), next_active.end());

    // Beam, then histogram pruning.
    active.clear();
    for (int v : next_active) {
      if (cur[v] >= best - config.beam_width_log)
        active.push_back(v);
      else
        cur[v] = kLogZero;
    }
    if (static_cast<int>(active.size()) > config.max_active) {
      std::vector<int> ranked = active;
      std::nth_element(ranked.begin(), ranked.begin() + config.max_active, ranked.end(),
                       [&](int a, int b) { return cur[a] > cur[b] || (cur[a] == cur[b] && a < b); });
      ranked.resize(config.max_active);
      std::sort(ranked.begin(), ranked.end());
      for (int v : active)
        if (!std::binary_search(ranked.begin(), ranked.end(), v)) cur[v] = kLogZero;
      active = std::move(ranked);
    }
    if (active.empty())
      throw Error(ErrorCode::kNoSurvivingPath,
                  features.source_id() + ": no token survived frame " + std::to_string(t));

    closure(cur, bp, active);
    std::swap(prev, cur);
  }

  if (prev[graph.final] == kLogZero)
    throw Error(ErrorCode::kNoSurvivingPath,
                features.source_id() + ": no token reached the final node");

  Hypothesis hyp;
  hyp.source_id = features.source_id();
  hyp.log_score = prev[graph.final];
  int layer = frames;
  int node = graph.final;
  for (;;) {
    hyp.trace.push_back({layer - 1, node});
    if (node == graph.start && layer == 0) break;
    const int pred = back[static_cast<std::size_t>(layer) * n + node];
    if (graph.IsEmitting(node)) --layer;
    node = pred;
    if (node < 0) throw Error(ErrorCode::kNoSurvivingPath, "broken traceback");
  }
  std::reverse(hyp.trace.begin(), hyp.trace.end());

  int open_start = -1, last_frame = -1;
  for (const auto& step : hyp.trace) {
    const auto& nd = graph.nodes[step.node];
    if (nd.kind == SearchGraph::NodeKind::kEmitting) {
      if (nd.word >= 0 && open_start < 0) open_start = step.frame;
      last_frame = step.frame;
    } else if (nd.kind == SearchGraph::NodeKind::kWordEnd) {
      hyp.words.push_back(graph.words[nd.word]);
      hyp.spans.push_back({open_start, last_frame});
      open_start = -1;
    }
  }
  return hyp;
}

std::vector<Hypothesis> DecodeBatch(const SearchGraph& graph, const AcousticModel& model,
                                    std::span<const FeatureSequence> features,
                                    const DecoderConfig& config, Execution execution) {
  std::vector<Hypothesis> out(features.size());
  ParallelFor(features.size(), execution, [&](std::size_t i) {
    out[i] = ViterbiDecode(graph, model, features[i], config);
  });
  return out;
}

Hypothesis DecodeFile(const std::filesystem::path& wav_path, const AcousticModel& model,
                      const SearchGraph& graph, const FrontendConfig& frontend,
                      const DecoderConfig& config) {
  const AudioSignal signal = LoadWav(wav_path);
  ValidateRate(signal, model.sample_rate_hz);
  return ViterbiDecode(graph, model, Mfcc(signal, frontend), config);
}

std::string FormatHypothesis(const Hypothesis& hyp) {
  std::string out = hyp.source_id;
  for (const auto& w : hyp.words) out += " " + w;
  out += " " + FormatScore(hyp.log_score);
  return out;
}

}  // namespace digitspeech
