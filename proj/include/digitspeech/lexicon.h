// include/digitspeech/lexicon.h

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

#ifndef DIGITSPEECH_LEXICON_H_
#define DIGITSPEECH_LEXICON_H_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace digitspeech {

inline constexpr std::string_view kSilencePhone = "SIL";

// Ordered set of phone symbols. SIL is always present.
class PhoneSet {
 public:
  // Adds SIL when missing. Throws Error(kUnknownPhone) for an empty or
  // whitespace-bearing symbol and Error(kDuplicateWord) for duplicates.
  explicit PhoneSet(std::vector<std::string> symbols);

  // Phones of the digit task: the 19 symbols used for the Arabic digits,
  // the extra single letters F, N, K that appear in the dictionary, and SIL.
  static PhoneSet ArabicDigits();

  // One symbol per line; blank lines and '#' comments ignored.
  static PhoneSet Parse(std::string_view text);

  bool Contains(std::string_view phone) const;
  // -1 when absent.
  int IndexOf(std::string_view phone) const;
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

using Pronunciation = std::vector<std::string>;

class Lexicon {
 public:
  explicit Lexicon(PhoneSet phones) : phones_(std::move(phones)) {}

  // Validates and adds one entry.
  void Add(const std::string& word, Pronunciation pronunciation);

  // Throws Error(kOutOfVocabulary).
  const Pronunciation& Lookup(std::string_view word) const;
  bool Contains(std::string_view word) const;

  const PhoneSet& phone_set() const { return phones_; }
  const std::map<std::string, Pronunciation, std::less<>>& entries() const {
    return entries_;
  }

  // "WORD PH PH ..." lines in word order.
  std::string Serialize() const;

 private:
  PhoneSet phones_;
  std::map<std::string, Pronunciation, std::less<>> entries_;
};

// Dictionary text: one "WORD PHONE PHONE ..." entry per line, whitespace
// separated, '#' starts a comment line. Errors carry the 1-based line:
// UnknownPhone, DuplicateWord, EmptyPronunciation.
Lexicon ParseDictionary(std::string_view text, const PhoneSet& phones);

// Splits on ASCII whitespace.
std::vector<std::string> SplitWords(std::string_view text);

}  // namespace digitspeech

#endif  // DIGITSPEECH_LEXICON_H_
