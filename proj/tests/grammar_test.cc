// tests/grammar_test.cc

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

#include <doctest.h>

#include <random>
#include <regex>
#include <string>

#include "digitspeech/corpus.h"
#include "digitspeech/grammar.h"
#include "expect_error.h"
#include "oracles.h"

using namespace digitspeech;

namespace {

const std::string kAssets = DIGITSPEECH_ASSET_DIR;

const std::vector<std::string> kDigits{"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"};

// Random expression rendered both as JSGF text and as a regex over
// space-terminated words.
struct RandomExpr {
  std::string jsgf;
  std::string regex;
};

RandomExpr MakeExpr(std::mt19937_64& rng, const std::vector<std::string>& words, int depth) {
  std::uniform_int_distribution<int> kind(0, depth > 0 ? 3 : 0);
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::uniform_int_distribution<int> arity(2, 3);
  switch (kind(rng)) {
    case 0: {
      const auto& w = words[pick(rng)];
      return {w, w + " "};
    }
    case 1: {
      RandomExpr out{"(", "(?:"};
      const int n = arity(rng);
      for (int i = 0; i < n; ++i) {
        const auto e = MakeExpr(rng, words, depth - 1);
        out.jsgf += (i ? " " : "") + e.jsgf;
        out.regex += e.regex;
      }
      out.jsgf += ")";
      out.regex += ")";
      return out;
    }
    case 2: {
      RandomExpr out{"(", "(?:"};
      const int n = arity(rng);
      for (int i = 0; i < n; ++i) {
        const auto e = MakeExpr(rng, words, depth - 1);
        out.jsgf += (i ? " | " : "") + e.jsgf;
        out.regex += (i ? "|" : "") + e.regex;
      }
      out.jsgf += ")";
      out.regex += ")";
      return out;
    }
    default: {
      const auto e = MakeExpr(rng, words, depth - 1);
      return {"(" + e.jsgf + ")*", "(?:" + e.regex + ")*"};
    }
  }
}

std::vector<std::string> RandomWords(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                                     int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::vector<std::string> out(len(rng));
  for (auto& w : out) w = alphabet[pick(rng)];
  return out;
}

}  // namespace

TEST_CASE("the shipped digit grammar parses") {
  const auto ast = ParseJsgf(ReadTextFile(kAssets + "/arabicdigits.gram"));
  CHECK(ast.name == "arabicdigits");
  CHECK(ast.public_rules == std::set<std::string>{"arabicdigits"});
  std::vector<GrammarExpr> alts;
  for (const auto& d : kDigits) alts.push_back(GrammarExpr::Terminal(d));
  CHECK(ast.rules.at("arabicdigits") == GrammarExpr::Star(GrammarExpr::Alternation(alts)));

  const auto fsa = CompileFsa(ast);
  CHECK_FALSE(fsa.HasEpsilons());
  CHECK(fsa.num_states == 1);
  CHECK(fsa.edges.size() == 10);
  CHECK(fsa.Terminals() == kDigits);
  CHECK(Accepts(fsa, std::vector<std::string>{}));
  CHECK(Accepts(fsa, std::vector<std::string>{"4"}));
  CHECK(Accepts(fsa, std::vector<std::string>{"1", "9", "0"}));
  CHECK_FALSE(Accepts(fsa, std::vector<std::string>{"10"}));
  CHECK_FALSE(Accepts(fsa, std::vector<std::string>{"4", "ten"}));
}

TEST_CASE("digit grammar agrees with a regex oracle") {
  const auto fsa = CompileFsa(ParseJsgf(ReadTextFile(kAssets + "/arabicdigits.gram")));
  const std::regex re("(?:(?:0 |1 |2 |3 |4 |5 |6 |7 |8 |9 ))*");
  std::vector<std::string> alphabet = kDigits;
  for (const char* d : {"10", "ten", "SIL", "un"}) alphabet.push_back(d);
  std::mt19937_64 rng(11);
  int accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto words = RandomWords(rng, alphabet, 6);
    const bool want = oracle::RegexAccepts(re, words);
    CHECK(Accepts(fsa, words) == want);
    accepted += want;
  }
  CHECK(accepted > 0);
  CHECK(accepted < 1000);
}

TEST_CASE("syntax subset") {
  const auto ast = ParseJsgf(
      "#JSGF V1.0;\n"
      "// line comment\n"
      "grammar g;\n"
      "<digit> = 1 | 2;\n"
      "public <pair> = <digit> /* inline */ <digit>;\n");
  const auto fsa = CompileFsa(ast, "pair");
  CHECK(Accepts(fsa, std::vector<std::string>{"1", "2"}));
  CHECK_FALSE(Accepts(fsa, std::vector<std::string>{"1"}));
  CHECK(ErrorOf([&] { CompileFsa(ast, "digit"); }) == ErrorCode::kUndefinedRule);
}

TEST_CASE("grammar errors") {
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\npublic <a> = 1+;\n"); }) ==
        ErrorCode::kUnsupportedFeature);
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\npublic <a> = [1];\n"); }) ==
        ErrorCode::kUnsupportedFeature);
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\npublic <a> = 1 {tag};\n"); }) ==
        ErrorCode::kUnsupportedFeature);
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\npublic <a> = /2/ 1 | /1/ 2;\n"); }) ==
        ErrorCode::kUnsupportedFeature);
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\nimport <x.y>;\npublic <a> = 1;\n"); }) ==
        ErrorCode::kUnsupportedFeature);
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\npublic <a> = 1 <b>;\n<b> = <a>;\n"); }) ==
        ErrorCode::kUnsupportedFeature);
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\npublic <a> = <missing>;\n"); }) ==
        ErrorCode::kUndefinedRule);
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\n<a> = 1;\n"); }) == ErrorCode::kSyntaxError);
  CHECK(ErrorOf([] { ParseJsgf("grammar g;\npublic <a> = 1 /* open\n"); }) ==
        ErrorCode::kSyntaxError);

  try {
    ParseJsgf("grammar g;\npublic <a> = (1 | 2;\n");
    FAIL("expected SyntaxError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSyntaxError);
    CHECK(e.line() == 2);
    CHECK(e.column() == 20);  // the ';' where ')' was expected
  }
}

TEST_CASE("compiled automata agree with the epsilon and regex oracles") {
  std::mt19937_64 rng(12);
  const std::vector<std::string> words{"a", "b", "c"};
  std::vector<std::string> alphabet = words;
  alphabet.push_back("z");
  for (int g = 0; g < 60; ++g) {
    const auto expr = MakeExpr(rng, words, 3);
    const auto ast = ParseJsgf("grammar r;\npublic <s> = " + expr.jsgf + ";\n");
    const auto thompson = ThompsonFsa(ast, "s");
    const auto no_eps = RemoveEpsilons(thompson);
    const auto dfa = CompileFsa(ast);
    CHECK_FALSE(no_eps.HasEpsilons());
    CHECK(no_eps.num_states <= thompson.num_states);
    // Deterministic: no state has two edges with one label.
    std::set<std::pair<int, std::string>> seen;
    for (const auto& e : dfa.edges) CHECK(seen.emplace(e.from, e.word).second);

    const std::regex re(expr.regex);
    for (int i = 0; i < 40; ++i) {
      const auto w = RandomWords(rng, alphabet, 5);
      const bool want = oracle::RegexAccepts(re, w);
      CHECK(oracle::EpsilonAccepts(thompson, w) == want);
      CHECK(Accepts(no_eps, w) == want);
      CHECK(Accepts(dfa, w) == want);
    }
  }
}

TEST_CASE("minimization merges equivalent states") {
  const auto dfa = CompileFsa(ParseJsgf("grammar m;\npublic <s> = (a b | c b) (a b | c b)*;\n"));
  // start -(a|c)-> mid -b-> final, final -(a|c)-> mid.
  CHECK(dfa.num_states == 3);
  CHECK(dfa.edges.size() == 5);
}
