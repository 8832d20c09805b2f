// tests/expect_error.h

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

#ifndef DIGITSPEECH_TESTS_EXPECT_ERROR_H_
#define DIGITSPEECH_TESTS_EXPECT_ERROR_H_

#include <doctest.h>

#include <optional>

#include "digitspeech/errors.h"

// Code of the digitspeech::Error thrown by f, or nullopt if none was.
template <typename F>
std::optional<digitspeech::ErrorCode> ErrorOf(F&& f) {
  try {
    f();
  } catch (const digitspeech::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#endif  // DIGITSPEECH_TESTS_EXPECT_ERROR_H_
