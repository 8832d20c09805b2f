// src/lexicon.cc

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

#include "digitspeech/lexicon.h"

#include <algorithm>
#include <cctype>

#include "digitspeech/errors.h"

namespace digitspeech {

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !IsSpace(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

PhoneSet::PhoneSet(std::vector<std::string> symbols) {
  if (std::find(symbols.begin(), symbols.end(), kSilencePhone) == symbols.end())
    symbols.emplace_back(kSilencePhone);
  for (auto& s : symbols) {
    if (s.empty() || std::any_of(s.begin(), s.end(), IsSpace))
      throw Error(ErrorCode::kUnknownPhone, "invalid phone symbol '" + s + "'");
    const int idx = static_cast<int>(symbols_.size());
    if (!index_.emplace(s, idx).second)
      throw Error(ErrorCode::kDuplicateWord, "duplicate phone symbol '" + s + "'");
    symbols_.push_back(std::move(s));
  }
}

PhoneSet PhoneSet::ArabicDigits() {
  return PhoneSet({"AA", "B",  "T", "TH", "HH", "KH", "D", "R", "AIN", "S",
                   "SS", "L",  "M", "H",  "W",  "Y",  "A", "I", "E",
                   "F",  "N",  "K", std::string(kSilencePhone)});
}

PhoneSet PhoneSet::Parse(std::string_view text) {
  std::vector<std::string> symbols;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto tokens = SplitWords(text.substr(start, end - start));
    if (!tokens.empty() && tokens[0][0] != '#')
      for (auto& t : tokens) symbols.push_back(std::move(t));
    start = end + 1;
  }
  return PhoneSet(std::move(symbols));
}

bool PhoneSet::Contains(std::string_view phone) const {
  return index_.count(std::string(phone)) != 0;
}

int PhoneSet::IndexOf(std::string_view phone) const {
  auto it = index_.find(std::string(phone));
  return it == index_.end() ? -1 : it->second;
}

void Lexicon::Add(const std::string& word, Pronunciation pronunciation) {
  if (word.empty()) throw Error(ErrorCode::kEmptyPronunciation, "empty word");
  if (pronunciation.empty())
    throw Error(ErrorCode::kEmptyPronunciation, "word '" + word + "' has no phones");
  for (const auto& p : pronunciation)
    if (!phones_.Contains(p))
      throw Error(ErrorCode::kUnknownPhone,
                  "phone '" + p + "' of word '" + word + "' is not in the phone set");
  if (entries_.count(word))
    throw Error(ErrorCode::kDuplicateWord, "word '" + word + "' defined twice");
  entries_.emplace(word, std::move(pronunciation));
}

const Pronunciation& Lexicon::Lookup(std::string_view word) const {
  auto it = entries_.find(word);
  if (it == entries_.end())
    throw Error(ErrorCode::kOutOfVocabulary, "'" + std::string(word) + "' is not in the dictionary");
  return it->second;
}

bool Lexicon::Contains(std::string_view word) const {
  return entries_.find(word) != entries_.end();
}

std::string Lexicon::Serialize() const {
  std::string out;
  for (const auto& [word, phones] : entries_) {
    out += word;
    for (const auto& p : phones) out += " " + p;
    out += "\n";
  }
  return out;
}

Lexicon ParseDictionary(std::string_view text, const PhoneSet& phones) {
  Lexicon lexicon(phones);
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto tokens = SplitWords(text.substr(start, end - start));
    start = end + 1;
    if (tokens.empty() || tokens[0][0] == '#') continue;

    const std::string word = tokens[0];
    if (tokens.size() == 1)
      throw Error(ErrorCode::kEmptyPronunciation,
                  "word '" + word + "' has no phones", line_no);
    Pronunciation pron(tokens.begin() + 1, tokens.end());
    for (const auto& p : pron)
      if (!phones.Contains(p))
        throw Error(ErrorCode::kUnknownPhone, "unknown phone '" + p + "'", line_no);
    if (lexicon.Contains(word))
      throw Error(ErrorCode::kDuplicateWord, "word '" + word + "' defined twice", line_no);
    lexicon.Add(word, std::move(pron));
  }
  return lexicon;
}

}  // namespace digitspeech
