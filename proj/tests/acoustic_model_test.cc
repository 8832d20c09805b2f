// tests/acoustic_model_test.cc

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

#include <doctest.h>

#include <cmath>
#include <random>

#include "digitspeech/acoustic_model.h"
#include "expect_error.h"
#include "oracles.h"
#include "random_models.h"

using namespace digitspeech;

namespace {

std::string Replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("single gaussian log density by hand") {
  HmmState s({{1.0, {0.0}, {1.0}}});
  CHECK(s.LogEmission(std::vector<double>{0.0}) == doctest::Approx(-0.5 * std::log(2 * M_PI)));
  CHECK(s.LogEmission(std::vector<double>{1.0}) ==
        doctest::Approx(-0.5 * std::log(2 * M_PI) - 0.5));
  CHECK(ErrorOf([&] { s.LogEmission(std::vector<double>{1.0, 2.0}); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("mixture log density matches the linear-domain oracle") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto hmm = testing_util::RandomPhone(rng, "P", 1, 4, 1 + trial % 4);
    const auto x = testing_util::RandomFrames(rng, 1, 4)[0];
    const double want = std::log(oracle::GmmDensity(hmm.states[0], x.data()));
    CHECK(hmm.states[0].LogEmission(x) == doctest::Approx(want).epsilon(1e-12));

    std::vector<double> parts;
    hmm.states[0].ComponentLogLikelihoods(x, parts);
    double total = oracle::kNegInf;
    for (double p : parts) total = oracle::LogAdd(total, p);
    CHECK(total == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("far-away observations stay finite") {
  HmmState s({{1.0, {0.0}, {1e-3}}});
  const double v = s.LogEmission(std::vector<double>{1e20});
  CHECK(std::isfinite(v));
  CHECK(v == kMinLogDensity);
}

TEST_CASE("left-to-right transitions") {
  const auto t = LeftToRightTransitions(3, 0.6);
  PhoneHmm hmm;
  hmm.states.resize(3);
  hmm.transitions = t;
  for (int i = 0; i < 3; ++i) {
    CHECK(hmm.Transition(i, i) == 0.6);
    CHECK(hmm.Transition(i, i + 1) == doctest::Approx(0.4));
  }
  CHECK(hmm.Transition(3, 3) == 1.0);
  CHECK(hmm.Transition(0, 2) == 0.0);
}

TEST_CASE("invariant checks") {
  std::mt19937_64 rng(22);
  auto model = testing_util::RandomModel(rng, {{"A", 3}, {"SIL", 2}}, 3, 2);
  CHECK(CheckInvariants(model, 1e-3) == "");

  auto bad = model;
  bad.phones.at("A").Transition(0, 0) += 0.1;
  CHECK(CheckInvariants(bad, 1e-3) != "");

  bad = model;
  bad.phones.at("A").Transition(0, 2) = 0.1;
  bad.phones.at("A").Transition(0, 0) -= 0.1;
  CHECK(CheckInvariants(bad, 1e-3) != "");

  CHECK(CheckInvariants(model, 10.0) != "");  // every variance is below this floor

  bad = model;
  auto mix = bad.phones.at("A").states[1].mixture();
  mix[0].weight += 0.2;
  bad.phones.at("A").states[1] = HmmState(mix);
  CHECK(CheckInvariants(bad, 1e-3) != "");

  bad = model;
  bad.feature_dim = 4;
  CHECK(CheckInvariants(bad, 1e-3) != "");
}

TEST_CASE("text format round-trips bit for bit") {
  std::mt19937_64 rng(23);
  auto model = testing_util::RandomModel(rng, {{"A", 3}, {"B", 1}, {"SIL", 3}}, 5, 3);
  model.frontend.pre_emphasis = 0.1 + 0.2;  // not exactly representable in short decimal
  const auto text = SerializeModel(model);
  CHECK(text.rfind("DIGITSPEECH-AM v1\n", 0) == 0);
  const auto back = ParseModel(text);
  CHECK(back == model);
  CHECK(SerializeModel(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "digitspeech_am_test.am";
  SaveModel(model, path);
  CHECK(LoadModel(path) == model);
  std::filesystem::remove(path);
}

TEST_CASE("schema errors") {
  std::mt19937_64 rng(24);
  const auto text = SerializeModel(testing_util::RandomModel(rng, {{"A", 2}}, 2, 1));
  CHECK(ErrorOf([&] { ParseModel(Replace(text, "DIGITSPEECH-AM v1", "DIGITSPEECH-AM v2")); }) ==
        ErrorCode::kSchemaError);
  CHECK(ErrorOf([&] { ParseModel(Replace(text, "feature_dim 2", "feature_dim 3")); }) ==
        ErrorCode::kSchemaError);
  CHECK(ErrorOf([&] { ParseModel(Replace(text, "num_phones 1", "num_phones 2")); }) ==
        ErrorCode::kSchemaError);
  CHECK(ErrorOf([&] { ParseModel(Replace(text, "END\n", "")); }) == ErrorCode::kSchemaError);
  CHECK(ErrorOf([&] { ParseModel(Replace(text, "MEAN ", "MEAN x")); }) ==
        ErrorCode::kSchemaError);
  CHECK(ErrorOf([&] { ParseModel(""); }) == ErrorCode::kSchemaError);
  CHECK(ErrorOf([&] { LoadModel("/nonexistent/model.am"); }) == ErrorCode::kIoError);
}
