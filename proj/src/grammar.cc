// src/grammar.cc

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

#include "digitspeech/grammar.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <queue>

#include "digitspeech/errors.h"

namespace digitspeech {

GrammarExpr GrammarExpr::Terminal(std::string word) {
  GrammarExpr e;
  e.kind = Kind::kTerminal;
  e.text = std::move(word);
  return e;
}

GrammarExpr GrammarExpr::RuleRef(std::string name) {
  GrammarExpr e;
  e.kind = Kind::kRuleRef;
  e.text = std::move(name);
  return e;
}

GrammarExpr GrammarExpr::Sequence(std::vector<GrammarExpr> items) {
  GrammarExpr e;
  e.kind = Kind::kSequence;
  e.children = std::move(items);
  return e;
}

GrammarExpr GrammarExpr::Alternation(std::vector<GrammarExpr> items) {
  GrammarExpr e;
  e.kind = Kind::kAlternation;
  e.children = std::move(items);
  return e;
}

GrammarExpr GrammarExpr::Star(GrammarExpr inner) {
  GrammarExpr e;
  e.kind = Kind::kKleeneStar;
  e.children.push_back(std::move(inner));
  return e;
}

namespace {

enum class Tok { kWord, kRuleName, kSemicolon, kEquals, kBar, kLParen, kRParen, kStar, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

bool IsWordChar(char c) {
  if (std::isspace(static_cast<unsigned char>(c))) return false;
  switch (c) {
    case ';': case '=': case '|': case '(': case ')': case '*': case '+':
    case '[': case ']': case '{': case '}': case '<': case '>': case '/':
    case '"': case '#':
      return false;
    default:
      return true;
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    for (;;) {
      SkipSpaceAndComments();
      if (pos_ >= text_.size()) {
        out.push_back({Tok::kEnd, "", line_, col_});
        return out;
      }
      const int line = line_, col = col_;
      const char c = text_[pos_];
      switch (c) {
        case ';': Advance(); out.push_back({Tok::kSemicolon, ";", line, col}); continue;
        case '=': Advance(); out.push_back({Tok::kEquals, "=", line, col}); continue;
        case '|': Advance(); out.push_back({Tok::kBar, "|", line, col}); continue;
        case '(': Advance(); out.push_back({Tok::kLParen, "(", line, col}); continue;
        case ')': Advance(); out.push_back({Tok::kRParen, ")", line, col}); continue;
        case '*': Advance(); out.push_back({Tok::kStar, "*", line, col}); continue;
        case '+':
          throw Error(ErrorCode::kUnsupportedFeature, "'+' repetition", line, col);
        case '[': case ']':
          throw Error(ErrorCode::kUnsupportedFeature, "'[...]' optional groups", line, col);
        case '{': case '}':
          throw Error(ErrorCode::kUnsupportedFeature, "'{...}' tags", line, col);
        case '/':
          throw Error(ErrorCode::kUnsupportedFeature, "'/weight/' weights", line, col);
        case '"':
          throw Error(ErrorCode::kUnsupportedFeature, "quoted tokens", line, col);
        case '#':
          if (!out.empty()) throw Error(ErrorCode::kSyntaxError, "unexpected '#'", line, col);
          SkipHeader();
          continue;
        case '<': {
          Advance();
          std::string name;
          while (pos_ < text_.size() && text_[pos_] != '>') {
            if (std::isspace(static_cast<unsigned char>(text_[pos_])))
              throw Error(ErrorCode::kSyntaxError, "whitespace in rule name", line_, col_);
            name += text_[pos_];
            Advance();
          }
          if (pos_ >= text_.size())
            throw Error(ErrorCode::kSyntaxError, "unterminated rule name", line, col);
          Advance();
          if (name.empty()) throw Error(ErrorCode::kSyntaxError, "empty rule name", line, col);
          out.push_back({Tok::kRuleName, name, line, col});
          continue;
        }
        default:
          break;
      }
      if (c == '>') throw Error(ErrorCode::kSyntaxError, "unexpected '>'", line, col);
      std::string word;
      while (pos_ < text_.size() && IsWordChar(text_[pos_])) {
        word += text_[pos_];
        Advance();
      }
      out.push_back({Tok::kWord, word, line, col});
    }
  }

 private:
  void Advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void SkipSpaceAndComments() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        Advance();
      } else if (text_.substr(pos_, 2) == "//") {
        while (pos_ < text_.size() && text_[pos_] != '\n') Advance();
      } else if (text_.substr(pos_, 2) == "/*") {
        const int line = line_, col = col_;
        Advance();
        Advance();
        while (pos_ < text_.size() && text_.substr(pos_, 2) != "*/") Advance();
        if (pos_ >= text_.size())
          throw Error(ErrorCode::kSyntaxError, "unterminated comment", line, col);
        Advance();
        Advance();
      } else {
        return;
      }
    }
  }

  // "#JSGF V1.0 [encoding [locale]];"
  void SkipHeader() {
    const int line = line_, col = col_;
    while (pos_ < text_.size() && text_[pos_] != ';') Advance();
    if (pos_ >= text_.size())
      throw Error(ErrorCode::kSyntaxError, "unterminated #JSGF header", line, col);
    Advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  GrammarAst Run() {
    GrammarAst ast;
    ExpectKeyword("grammar");
    const Token& name = Expect(Tok::kWord, "grammar name");
    ast.name = name.text;
    Expect(Tok::kSemicolon, "';' after grammar name");

    while (Peek().kind != Tok::kEnd) {
      bool is_public = false;
      if (Peek().kind == Tok::kWord && Peek().text == "import")
        throw Error(ErrorCode::kUnsupportedFeature, "import statements", Peek().line,
                    Peek().column);
      if (Peek().kind == Tok::kWord && Peek().text == "public") {
        is_public = true;
        Next();
      }
      const Token rule = Expect(Tok::kRuleName, "rule definition");
      if (ast.rules.count(rule.text))
        throw Error(ErrorCode::kSyntaxError, "rule <" + rule.text + "> defined twice",
                    rule.line, rule.column);
      if (Peek().kind == Tok::kEquals) Next();
      GrammarExpr body = ParseAlternation();
      Expect(Tok::kSemicolon, "';' after rule body");
      ast.rules.emplace(rule.text, std::move(body));
      if (is_public) ast.public_rules.insert(rule.text);
      rule_pos_.emplace(rule.text, rule);
    }
    if (ast.public_rules.empty())
      throw Error(ErrorCode::kSyntaxError, "grammar declares no public rule");
    CheckReferences(ast);
    return ast;
  }

 private:
  const Token& Peek() const { return toks_[pos_]; }
  const Token& Next() { return toks_[pos_++]; }

  const Token& Expect(Tok kind, const std::string& what) {
    if (Peek().kind != kind) Fail("expected " + what);
    return Next();
  }

  void ExpectKeyword(const std::string& word) {
    if (Peek().kind != Tok::kWord || Peek().text != word) Fail("expected '" + word + "'");
    Next();
  }

  [[noreturn]] void Fail(const std::string& what) const {
    const Token& t = Peek();
    const std::string found = t.kind == Tok::kEnd ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorCode::kSyntaxError, what + ", found " + found, t.line, t.column);
  }

  GrammarExpr ParseAlternation() {
    std::vector<GrammarExpr> items;
    items.push_back(ParseSequence());
    while (Peek().kind == Tok::kBar) {
      Next();
      items.push_back(ParseSequence());
    }
    if (items.size() == 1) return std::move(items.front());
    return GrammarExpr::Alternation(std::move(items));
  }

  GrammarExpr ParseSequence() {
    std::vector<GrammarExpr> items;
    for (;;) {
      const Tok k = Peek().kind;
      if (k != Tok::kWord && k != Tok::kRuleName && k != Tok::kLParen) break;
      items.push_back(ParseUnary());
    }
    if (items.empty()) Fail("expected expression");
    if (items.size() == 1) return std::move(items.front());
    return GrammarExpr::Sequence(std::move(items));
  }

  GrammarExpr ParseUnary() {
    GrammarExpr e = ParsePrimary();
    while (Peek().kind == Tok::kStar) {
      Next();
      e = GrammarExpr::Star(std::move(e));
    }
    return e;
  }

  GrammarExpr ParsePrimary() {
    const Token& t = Next();
    switch (t.kind) {
      case Tok::kWord:
        return GrammarExpr::Terminal(t.text);
      case Tok::kRuleName:
        return GrammarExpr::RuleRef(t.text);
      case Tok::kLParen: {
        GrammarExpr inner = ParseAlternation();
        Expect(Tok::kRParen, "')'");
        return inner;
      }
      default:
        --pos_;
        Fail("expected expression");
    }
  }

  void CheckReferences(const GrammarAst& ast) const {
    // 0 = unvisited, 1 = on stack, 2 = done.
    std::map<std::string, int> mark;
    std::function<void(const std::string&, const GrammarExpr&)> visit_expr;
    std::function<void(const std::string&)> visit_rule = [&](const std::string& name) {
      mark[name] = 1;
      visit_expr(name, ast.rules.at(name));
      mark[name] = 2;
    };
    visit_expr = [&](const std::string& owner, const GrammarExpr& e) {
      if (e.kind == GrammarExpr::Kind::kRuleRef) {
        const Token& where = rule_pos_.at(owner);
        if (!ast.rules.count(e.text))
          throw Error(ErrorCode::kUndefinedRule,
                      "rule <" + e.text + "> referenced from <" + owner + "> is not defined",
                      where.line, where.column);
        const int m = mark[e.text];
        if (m == 1)
          throw Error(ErrorCode::kUnsupportedFeature,
                      "recursive rule <" + e.text + "> reached from <" + owner + ">",
                      where.line, where.column);
        if (m == 0) visit_rule(e.text);
        return;
      }
      for (const auto& c : e.children) visit_expr(owner, c);
    };
    for (const auto& [name, body] : ast.rules)
      if (mark[name] == 0) visit_rule(name);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Token> rule_pos_;
};

class ThompsonBuilder {
 public:
  explicit ThompsonBuilder(const GrammarAst& ast) : ast_(ast) {}

  std::pair<int, int> Build(const GrammarExpr& e) {
    using Kind = GrammarExpr::Kind;
    switch (e.kind) {
      case Kind::kTerminal: {
        const int s = NewState(), f = NewState();
        fsa_.edges.push_back({s, e.text, f});
        return {s, f};
      }
      case Kind::kRuleRef:
        return Build(ast_.rules.at(e.text));
      case Kind::kSequence: {
        auto [s, f] = Build(e.children.front());
        for (std::size_t i = 1; i < e.children.size(); ++i) {
          auto [s2, f2] = Build(e.children[i]);
          Epsilon(f, s2);
          f = f2;
        }
        return {s, f};
      }
      case Kind::kAlternation: {
        const int s = NewState(), f = NewState();
        for (const auto& c : e.children) {
          auto [cs, cf] = Build(c);
          Epsilon(s, cs);
          Epsilon(cf, f);
        }
        return {s, f};
      }
      case Kind::kKleeneStar: {
        const int s = NewState(), f = NewState();
        auto [cs, cf] = Build(e.children.front());
        Epsilon(s, cs);
        Epsilon(s, f);
        Epsilon(cf, cs);
        Epsilon(cf, f);
        return {s, f};
      }
    }
    return {0, 0};
  }

  WordFsa Finish(int start, int final_state) {
    fsa_.start = start;
    fsa_.is_final.assign(fsa_.num_states, false);
    fsa_.is_final[final_state] = true;
    return std::move(fsa_);
  }

 private:
  int NewState() { return fsa_.num_states++; }
  void Epsilon(int from, int to) { fsa_.edges.push_back({from, "", to}); }

  const GrammarAst& ast_;
  WordFsa fsa_;
};

std::vector<std::vector<int>> OutEdges(const WordFsa& fsa) {
  std::vector<std::vector<int>> out(fsa.num_states);
  for (int i = 0; i < static_cast<int>(fsa.edges.size()); ++i)
    out[fsa.edges[i].from].push_back(i);
  return out;
}

// Keeps the states reachable from start that can reach a final state, in
// BFS order from start with edges visited by (word, target).
WordFsa PruneAndRenumber(const WordFsa& fsa) {
  const int n = fsa.num_states;
  std::vector<std::vector<int>> rev(n);
  for (const auto& e : fsa.edges) rev[e.to].push_back(e.from);
  std::vector<bool> coreach(n, false);
  std::vector<int> stack;
  for (int s = 0; s < n; ++s)
    if (fsa.is_final[s]) {
      coreach[s] = true;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    for (int p : rev[s])
      if (!coreach[p]) {
        coreach[p] = true;
        stack.push_back(p);
      }
  }

  auto out = OutEdges(fsa);
  for (auto& list : out)
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      const auto& ea = fsa.edges[a];
      const auto& eb = fsa.edges[b];
      return std::tie(ea.word, ea.to) < std::tie(eb.word, eb.to);
    });

  std::vector<int> new_id(n, -1);
  std::vector<int> order;
  std::queue<int> queue;
  new_id[fsa.start] = 0;
  order.push_back(fsa.start);
  queue.push(fsa.start);
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop();
    for (int ei : out[s]) {
      const int t = fsa.edges[ei].to;
      if (!coreach[t] || new_id[t] >= 0) continue;
      new_id[t] = static_cast<int>(order.size());
      order.push_back(t);
      queue.push(t);
    }
  }

  WordFsa result;
  result.num_states = static_cast<int>(order.size());
  result.start = 0;
  result.is_final.assign(result.num_states, false);
  for (int s : order) {
    result.is_final[new_id[s]] = fsa.is_final[s];
    for (int ei : out[s]) {
      const auto& e = fsa.edges[ei];
      if (new_id[e.to] < 0) continue;
      WordFsa::Edge edge{new_id[s], e.word, new_id[e.to]};
      if (result.edges.empty() || !(result.edges.back() == edge)) result.edges.push_back(edge);
    }
  }
  return result;
}

// Subset construction on an epsilon-free automaton.
WordFsa Determinize(const WordFsa& fsa) {
  const auto out = OutEdges(fsa);
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> subsets;
  WordFsa dfa;
  auto intern = [&](std::vector<int> subset) {
    auto [it, inserted] = ids.emplace(subset, static_cast<int>(subsets.size()));
    if (inserted) subsets.push_back(std::move(subset));
    return it->second;
  };
  intern({fsa.start});
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::map<std::string, std::set<int>> moves;
    for (int s : subsets[i])
      for (int ei : out[s]) moves[fsa.edges[ei].word].insert(fsa.edges[ei].to);
    for (auto& [word, targets] : moves) {
      const int to = intern(std::vector<int>(targets.begin(), targets.end()));
      dfa.edges.push_back({static_cast<int>(i), word, to});
    }
  }
  dfa.num_states = static_cast<int>(subsets.size());
  dfa.start = 0;
  dfa.is_final.assign(dfa.num_states, false);
  for (int i = 0; i < dfa.num_states; ++i)
    for (int s : subsets[i])
      if (fsa.is_final[s]) dfa.is_final[i] = true;
  return dfa;
}

// Moore partition refinement on a partial DFA (missing moves go to an
// implicit dead state).
WordFsa Minimize(const WordFsa& dfa) {
  const int n = dfa.num_states;
  const auto out = OutEdges(dfa);
  std::vector<int> cls(n);
  for (int s = 0; s < n; ++s) cls[s] = dfa.is_final[s] ? 1 : 0;
  int num_classes = 0;
  for (;;) {
    std::map<std::pair<int, std::vector<std::pair<std::string, int>>>, int> sig_ids;
    std::vector<int> next(n);
    for (int s = 0; s < n; ++s) {
      std::vector<std::pair<std::string, int>> sig;
      for (int ei : out[s]) sig.emplace_back(dfa.edges[ei].word, cls[dfa.edges[ei].to]);
      std::sort(sig.begin(), sig.end());
      auto key = std::make_pair(cls[s], std::move(sig));
      auto it = sig_ids.emplace(std::move(key), static_cast<int>(sig_ids.size())).first;
      next[s] = it->second;
    }
    const int count = static_cast<int>(sig_ids.size());
    cls = std::move(next);
    if (count == num_classes) break;
    num_classes = count;
  }
  WordFsa min;
  min.num_states = num_classes;
  min.start = cls[dfa.start];
  min.is_final.assign(num_classes, false);
  for (int s = 0; s < n; ++s) {
    if (dfa.is_final[s]) min.is_final[cls[s]] = true;
    for (int ei : out[s]) min.edges.push_back({cls[s], dfa.edges[ei].word, cls[dfa.edges[ei].to]});
  }
  std::sort(min.edges.begin(), min.edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.from, a.word, a.to) < std::tie(b.from, b.word, b.to);
  });
  min.edges.erase(std::unique(min.edges.begin(), min.edges.end()), min.edges.end());
  return PruneAndRenumber(min);
}

}  // namespace

GrammarAst ParseJsgf(std::string_view text) {
  return Parser(Lexer(text).Run()).Run();
}

bool WordFsa::HasEpsilons() const {
  return std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.IsEpsilon(); });
}

std::vector<int> WordFsa::Finals() const {
  std::vector<int> out;
  for (int s = 0; s < num_states; ++s)
    if (is_final[s]) out.push_back(s);
  return out;
}

std::vector<std::string> WordFsa::Terminals() const {
  std::set<std::string> words;
  for (const auto& e : edges)
    if (!e.IsEpsilon()) words.insert(e.word);
  return {words.begin(), words.end()};
}

WordFsa ThompsonFsa(const GrammarAst& ast, const std::string& rule) {
  auto it = ast.rules.find(rule);
  if (it == ast.rules.end())
    throw Error(ErrorCode::kUndefinedRule, "rule <" + rule + "> is not defined");
  ThompsonBuilder builder(ast);
  auto [s, f] = builder.Build(it->second);
  return builder.Finish(s, f);
}

WordFsa RemoveEpsilons(const WordFsa& fsa) {
  const int n = fsa.num_states;
  const auto out = OutEdges(fsa);
  WordFsa result;
  result.num_states = n;
  result.start = fsa.start;
  result.is_final.assign(n, false);
  std::vector<int> seen(n, -1);
  for (int s = 0; s < n; ++s) {
    std::vector<int> stack{s};
    seen[s] = s;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (fsa.is_final[u]) result.is_final[s] = true;
      for (int ei : out[u]) {
        const auto& e = fsa.edges[ei];
        if (e.IsEpsilon()) {
          if (seen[e.to] != s) {
            seen[e.to] = s;
            stack.push_back(e.to);
          }
        } else {
          result.edges.push_back({s, e.word, e.to});
        }
      }
    }
  }
  return PruneAndRenumber(result);
}

WordFsa CompileFsa(const GrammarAst& ast, const std::string& start_rule) {
  if (!ast.public_rules.count(start_rule))
    throw Error(ErrorCode::kUndefinedRule, "<" + start_rule + "> is not a public rule");
  return Minimize(Determinize(RemoveEpsilons(ThompsonFsa(ast, start_rule))));
}

WordFsa CompileFsa(const GrammarAst& ast) {
  return CompileFsa(ast, *ast.public_rules.begin());
}

bool Accepts(const WordFsa& fsa, std::span<const std::string> words) {
  std::vector<bool> current(fsa.num_states, false);
  current[fsa.start] = true;
  for (const auto& w : words) {
    std::vector<bool> next(fsa.num_states, false);
    bool any = false;
    for (const auto& e : fsa.edges)
      if (current[e.from] && e.word == w) {
        next[e.to] = true;
        any = true;
      }
    if (!any) return false;
    current = std::move(next);
  }
  for (int s = 0; s < fsa.num_states; ++s)
    if (current[s] && fsa.is_final[s]) return true;
  return false;
}

}  // namespace digitspeech
