// src/errors.cc

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

#include "digitspeech/errors.h"

namespace digitspeech {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedWav: return "MalformedWav";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kEmptyAudio: return "EmptyAudio";
    case ErrorCode::kSampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kDegenerateFilter: return "DegenerateFilter";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kUnknownPhone: return "UnknownPhone";
    case ErrorCode::kDuplicateWord: return "DuplicateWord";
    case ErrorCode::kEmptyPronunciation: return "EmptyPronunciation";
    case ErrorCode::kOutOfVocabulary: return "OutOfVocabulary";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUndefinedRule: return "UndefinedRule";
    case ErrorCode::kUnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kInfeasibleAlignment: return "InfeasibleAlignment";
    case ErrorCode::kAllUtterancesInfeasible: return "AllUtterancesInfeasible";
    case ErrorCode::kMissingPhoneModel: return "MissingPhoneModel";
    case ErrorCode::kNoSurvivingPath: return "NoSurvivingPath";
    case ErrorCode::kOrphanTranscript: return "OrphanTranscript";
    case ErrorCode::kOrphanFileid: return "OrphanFileid";
    case ErrorCode::kBadTranscriptLine: return "BadTranscriptLine";
    case ErrorCode::kMissingHypothesis: return "MissingHypothesis";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string Decorate(ErrorCode code, const std::string& message, int line,
                     int column) {
  std::string out(ErrorCodeName(code));
  if (line > 0) {
    out += " at line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
  }
  out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, int line, int column)
    : std::runtime_error(Decorate(code, message, line, column)),
      code_(code),
      line_(line),
      column_(column) {}

SampleRateMismatch::SampleRateMismatch(int found_hz, int required_hz)
    : Error(ErrorCode::kSampleRateMismatch,
            "found " + std::to_string(found_hz) + " Hz, required " +
                std::to_string(required_hz) + " Hz"),
      found_hz_(found_hz),
      required_hz_(required_hz) {}

}  // namespace digitspeech
