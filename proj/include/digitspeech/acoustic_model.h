// include/digitspeech/acoustic_model.h

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

#ifndef DIGITSPEECH_ACOUSTIC_MODEL_H_
#define DIGITSPEECH_ACOUSTIC_MODEL_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "digitspeech/frontend.h"

namespace digitspeech {

inline constexpr double kDefaultVarianceFloor = 1e-3;
inline constexpr int kDefaultStatesPerPhone = 3;

// Lower bound of every log density / log score; keeps arithmetic finite.
inline constexpr double kMinLogDensity = -1e30;

// Diagonal-covariance Gaussian with its mixture weight.
struct GaussianComponent {
  double weight = 1.0;
  std::vector<double> mean;
  std::vector<double> variance;

  bool operator==(const GaussianComponent& o) const {
    return weight == o.weight && mean == o.mean && variance == o.variance;
  }
};

class HmmState {
 public:
  HmmState() = default;
  explicit HmmState(std::vector<GaussianComponent> mixture);

  const std::vector<GaussianComponent>& mixture() const { return mixture_; }
  int dim() const { return mixture_.empty() ? 0 : static_cast<int>(mixture_[0].mean.size()); }

  // log sum_m w_m N(x; mu_m, diag(var_m)), via log-sum-exp. Throws
  // DimensionMismatch.
  double LogEmission(std::span<const double> observation) const;

  // Per-component log(w_m) + log N_m(x), same order as mixture().
  void ComponentLogLikelihoods(std::span<const double> observation,
                               std::vector<double>& out) const;

  bool operator==(const HmmState& o) const { return mixture_ == o.mixture_; }

 private:
  void Precompute();

  std::vector<GaussianComponent> mixture_;
  // Cached log(w) - 0.5 * (D log 2pi + sum log var) and 1/var.
  std::vector<double> log_const_;
  std::vector<std::vector<double>> inv_variance_;
};

// Left-to-right phone model. transitions is (S+1) x (S+1) row-major: rows
// and columns 0..S-1 are the emitting states, index S is the exit. Entry
// goes to state 0. Row S is absorbing (exit -> exit = 1).
struct PhoneHmm {
  std::string phone;
  std::vector<HmmState> states;
  std::vector<double> transitions;

  int num_states() const { return static_cast<int>(states.size()); }
  double Transition(int from, int to) const {
    return transitions[static_cast<std::size_t>(from) * (states.size() + 1) + to];
  }
  double& Transition(int from, int to) {
    return transitions[static_cast<std::size_t>(from) * (states.size() + 1) + to];
  }

  bool operator==(const PhoneHmm&) const = default;
};

// Builds the (S+1)x(S+1) matrix with the given self-loop probability on
// every emitting state.
std::vector<double> LeftToRightTransitions(int num_states, double self_loop);

struct AcousticModel {
  int feature_dim = 0;
  int sample_rate_hz = kCorpusSampleRateHz;
  FrontendConfig frontend;
  std::map<std::string, PhoneHmm, std::less<>> phones;

  // nullptr when absent.
  const PhoneHmm* Find(std::string_view phone) const;

  bool operator==(const AcousticModel&) const = default;
};

// Checks the type invariants: dimensions, weights > 0 summing to 1,
// variances >= floor, row-stochastic left-to-right transitions. Returns an
// empty string when valid, otherwise a description of the first violation.
std::string CheckInvariants(const AcousticModel& model, double variance_floor,
                            double tolerance = 1e-9);

// Versioned text format ("DIGITSPEECH-AM v1"). Reals are written in the
// shortest form that round-trips exactly.
std::string SerializeModel(const AcousticModel& model);
// Throws SchemaError on a malformed or inconsistent file.
AcousticModel ParseModel(std::string_view text);

void SaveModel(const AcousticModel& model, const std::filesystem::path& path);
AcousticModel LoadModel(const std::filesystem::path& path);

}  // namespace digitspeech

#endif  // DIGITSPEECH_ACOUSTIC_MODEL_H_
