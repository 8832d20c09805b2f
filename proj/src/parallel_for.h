// src/parallel_for.h

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

#ifndef DIGITSPEECH_SRC_PARALLEL_FOR_H_
#define DIGITSPEECH_SRC_PARALLEL_FOR_H_

#include <cstddef>
#include <exception>
#include <vector>

#include "digitspeech/execution.h"

namespace digitspeech {

// Runs body(i) for i in [0, n). With kParallel the iterations are spread
// over OpenMP threads; body must only write to slot i of its outputs.
// Exceptions are captured per iteration and the one with the lowest index
// is rethrown, so both paths fail identically.
template <typename Body>
void ParallelFor(std::size_t n, Execution execution, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
  if (execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    for (long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace digitspeech

#endif  // DIGITSPEECH_SRC_PARALLEL_FOR_H_
