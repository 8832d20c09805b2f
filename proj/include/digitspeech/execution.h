// include/digitspeech/execution.h

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

#ifndef DIGITSPEECH_EXECUTION_H_
#define DIGITSPEECH_EXECUTION_H_

namespace digitspeech {

// Selects between the serial reference loop and the OpenMP loop of the
// utterance-level kernels. Both produce bit-identical results.
enum class Execution { kSerial, kParallel };

// Number of OpenMP threads available, 1 when built without OpenMP.
int MaxThreads();

}  // namespace digitspeech

#endif  // DIGITSPEECH_EXECUTION_H_
