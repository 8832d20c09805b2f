// include/digitspeech/cli.h

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

#ifndef DIGITSPEECH_CLI_H_
#define DIGITSPEECH_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace digitspeech {

// Command-line front end. Subcommands: validate, features, train, decode,
// eval, graph, synth. Returns 0 on success, 1 on a user error (bad usage,
// bad input files) and 2 on an internal error.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace digitspeech

#endif  // DIGITSPEECH_CLI_H_
