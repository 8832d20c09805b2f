// include/digitspeech/grammar.h

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

#ifndef DIGITSPEECH_GRAMMAR_H_
#define DIGITSPEECH_GRAMMAR_H_

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace digitspeech {

// Rule expression of the supported JSGF subset.
struct GrammarExpr {
  enum class Kind { kTerminal, kSequence, kAlternation, kKleeneStar, kRuleRef };

  Kind kind = Kind::kTerminal;
  // Word for kTerminal, rule name for kRuleRef.
  std::string text;
  std::vector<GrammarExpr> children;

  static GrammarExpr Terminal(std::string word);
  static GrammarExpr RuleRef(std::string name);
  static GrammarExpr Sequence(std::vector<GrammarExpr> items);
  static GrammarExpr Alternation(std::vector<GrammarExpr> items);
  static GrammarExpr Star(GrammarExpr inner);

  bool operator==(const GrammarExpr&) const = default;
};

struct GrammarAst {
  std::string name;
  std::map<std::string, GrammarExpr> rules;
  std::set<std::string> public_rules;
};

// Parses the subset: optional "#JSGF ...;" header, "grammar NAME;",
// /* */ and // comments, "[public] <rule> [=] expr;" (the '=' may be
// omitted), '|', parentheses, juxtaposition, postfix '*'. Imports, weights,
// tags, '+', '[...]' optionals and recursive rules raise UnsupportedFeature;
// references to undefined rules raise UndefinedRule; anything else malformed
// raises SyntaxError with line and column.
GrammarAst ParseJsgf(std::string_view text);

inline constexpr int kNoState = -1;

// Word-level automaton. An empty label is an epsilon edge.
struct WordFsa {
  struct Edge {
    int from = 0;
    std::string word;
    int to = 0;
    bool IsEpsilon() const { return word.empty(); }
    bool operator==(const Edge&) const = default;
  };

  int num_states = 0;
  int start = 0;
  std::vector<bool> is_final;
  std::vector<Edge> edges;

  bool HasEpsilons() const;
  std::vector<int> Finals() const;
  // Distinct word labels in sorted order.
  std::vector<std::string> Terminals() const;
};

// Thompson construction of the named rule, with rule references inlined.
// The result may contain epsilon edges.
WordFsa ThompsonFsa(const GrammarAst& ast, const std::string& rule);

// Removes epsilon edges by closure, then prunes states that are not
// reachable from start or cannot reach a final state (start is kept).
// Duplicate edges are merged and states renumbered in BFS order.
WordFsa RemoveEpsilons(const WordFsa& fsa);

// ThompsonFsa, RemoveEpsilons, then subset construction and minimization:
// the result is the minimal deterministic automaton of the rule.
// start_rule must be public.
WordFsa CompileFsa(const GrammarAst& ast, const std::string& start_rule);
// Compiles the first public rule in name order.
WordFsa CompileFsa(const GrammarAst& ast);

// Membership test on an epsilon-free automaton (on-the-fly subset
// simulation).
bool Accepts(const WordFsa& fsa, std::span<const std::string> words);

}  // namespace digitspeech

#endif  // DIGITSPEECH_GRAMMAR_H_
