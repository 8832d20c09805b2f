// include/digitspeech/errors.h

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

#ifndef DIGITSPEECH_ERRORS_H_
#define DIGITSPEECH_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace digitspeech {

enum class ErrorCode {
  // audio_io
  kMalformedWav,
  kUnsupportedFormat,
  kEmptyAudio,
  kSampleRateMismatch,
  // frontend
  kInvalidConfig,
  kDegenerateFilter,
  kTooShort,
  // lexicon
  kUnknownPhone,
  kDuplicateWord,
  kEmptyPronunciation,
  kOutOfVocabulary,
  // grammar
  kSyntaxError,
  kUndefinedRule,
  kUnsupportedFeature,
  // acoustic model
  kDimensionMismatch,
  kSchemaError,
  kIoError,
  // trainer
  kEmptyCorpus,
  kInfeasibleAlignment,
  kAllUtterancesInfeasible,
  // decoder
  kMissingPhoneModel,
  kNoSurvivingPath,
  // corpus / eval / cli
  kOrphanTranscript,
  kOrphanFileid,
  kBadTranscriptLine,
  kMissingHypothesis,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures of the toolkit are reported through this type.
// line/column are 1-based and 0 when not applicable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0,
        int column = 0);

  ErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorCode code_;
  int line_;
  int column_;
};

class SampleRateMismatch : public Error {
 public:
  SampleRateMismatch(int found_hz, int required_hz);
  int found_hz() const { return found_hz_; }
  int required_hz() const { return required_hz_; }

 private:
  int found_hz_;
  int required_hz_;
};

}  // namespace digitspeech

#endif  // DIGITSPEECH_ERRORS_H_
