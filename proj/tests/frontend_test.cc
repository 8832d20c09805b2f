// tests/frontend_test.cc

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
#include <numbers>
#include <random>

#include "digitspeech/frontend.h"
#include "expect_error.h"
#include "oracles.h"

using namespace digitspeech;

namespace {

AudioSignal RandomSignal(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  AudioSignal sig;
  sig.sample_rate_hz = 16000;
  sig.source_id = "rand";
  for (std::size_t i = 0; i < n; ++i) sig.samples.push_back(u(rng));
  return sig;
}

}  // namespace

TEST_CASE("pre-emphasis") {
  CHECK(PreEmphasize(std::vector<double>{1, 1, 1}, 0.97) ==
        std::vector<double>{1.0, 1.0 - 0.97, 1.0 - 0.97});
  const std::vector<double> x{0.3, -0.2, 0.9};
  CHECK(PreEmphasize(x, 0.0) == x);

  std::mt19937_64 rng(1);
  const auto sig = RandomSignal(rng, 100);
  const auto y = PreEmphasize(sig.samples, 0.97);
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double want = sig.samples[n] - (n ? 0.97 * sig.samples[n - 1] : 0.0);
    CHECK(y[n] == doctest::Approx(want).epsilon(1e-15));
  }
}

TEST_CASE("frame counts") {
  CHECK(NumFrames(16000, 400, 160) == 98);
  CHECK(NumFrames(399, 400, 160) == 0);
  CHECK(NumFrames(400, 400, 160) == 1);
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  const auto frames = FrameSignal(x, 400, 160);
  REQUIRE(frames.size() == 4);
  CHECK(frames[2].front() == 320.0);
  CHECK(frames[2].back() == 719.0);
}

TEST_CASE("hamming window") {
  const auto w = HammingWeights(400);
  CHECK(w[0] == doctest::Approx(0.08));
  CHECK(w[399] == doctest::Approx(0.08));
  CHECK(HammingWeights(401)[200] == doctest::Approx(1.0));
  const auto ones = HammingWindow(std::vector<double>(400, 1.0));
  for (int n = 0; n < 400; ++n)
    CHECK(ones[n] == doctest::Approx(0.54 - 0.46 * std::cos(2 * std::numbers::pi * n / 399)));
}

TEST_CASE("power spectrum against naive DFT") {
  std::mt19937_64 rng(2);
  const auto sig = RandomSignal(rng, 512);
  const auto fast = PowerSpectrum(sig.samples, 512);
  const auto slow = oracle::NaivePowerSpectrum(sig.samples, 512);
  REQUIRE(fast.size() == 257);
  for (int k = 0; k <= 256; ++k) CHECK(fast[k] == doctest::Approx(slow[k]).epsilon(1e-6));

  // Zero padding of a shorter frame.
  std::vector<double> shorter(sig.samples.begin(), sig.samples.begin() + 400);
  const auto padded = PowerSpectrum(shorter, 512);
  const auto padded_ref = oracle::NaivePowerSpectrum(shorter, 512);
  for (int k = 0; k <= 256; ++k) CHECK(padded[k] == doctest::Approx(padded_ref[k]).epsilon(1e-6));

  const auto zero = PowerSpectrum(std::vector<double>(400, 0.0), 512);
  for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("a cosine on a bin concentrates its energy there") {
  const int k0 = 37;
  std::vector<double> x(512);
  for (int n = 0; n < 512; ++n) x[n] = std::cos(2 * std::numbers::pi * k0 * n / 512);
  const auto p = PowerSpectrum(x, 512);
  for (int k = 0; k <= 256; ++k)
    if (k != k0) CHECK(p[k] < 1e-9 * p[k0]);
}

TEST_CASE("mel scale") {
  CHECK(MelOfHz(0.0) == 0.0);
  CHECK(MelOfHz(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
  CHECK(MelOfHz(8000.0) == doctest::Approx(2840.02).epsilon(1e-5));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 8000.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    if (a < b) CHECK(MelOfHz(a) < MelOfHz(b));
    CHECK(HzOfMel(MelOfHz(a)) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("mel filterbank") {
  FrontendConfig config;
  const auto bank = MelFilterbank(config, 16000);
  CHECK(bank.rows == 26);
  CHECK(bank.cols == 257);
  oracle::MfccParams p;
  int last_peak = -1;
  for (int m = 0; m < 26; ++m) {
    double sum = 0.0;
    int peak = 0;
    for (int k = 0; k < 257; ++k) {
      CHECK(bank(m, k) >= 0.0);
      CHECK(bank(m, k) == doctest::Approx(oracle::Triangle(p, m, k * 16000.0 / 512)));
      sum += bank(m, k);
      if (bank(m, k) > bank(m, peak)) peak = k;
    }
    CHECK(sum > 0.0);
    CHECK(peak > last_peak);
    last_peak = peak;
  }

  FrontendConfig tiny;
  tiny.fft_size = 32;
  tiny.frame_length_ms = 2.0;  // 32 samples, so only the filter layout is at fault
  tiny.frame_shift_ms = 1.0;
  CHECK(ErrorOf([&] { MelFilterbank(tiny, 16000); }) == ErrorCode::kDegenerateFilter);
}

TEST_CASE("dct matrix is orthonormal") {
  const auto dct = DctMatrix(26, 26);
  for (int i = 0; i < 26; ++i)
    for (int j = 0; j < 26; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 26; ++k) dot += dct(i, k) * dct(j, k);
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("config validation") {
  FrontendConfig c;
  CHECK_NOTHROW(c.Validate(16000));
  CHECK(c.FrameLengthSamples(16000) == 400);
  CHECK(c.FrameShiftSamples(16000) == 160);
  CHECK(c.FeatureDim() == 39);
  FrontendConfig bad = c;
  bad.num_cepstra = 30;
  CHECK(ErrorOf([&] { bad.Validate(16000); }) == ErrorCode::kInvalidConfig);
  bad = c;
  bad.fft_size = 256;
  CHECK(ErrorOf([&] { bad.Validate(16000); }) == ErrorCode::kInvalidConfig);
  bad = c;
  bad.frame_shift_ms = 30;
  CHECK(ErrorOf([&] { bad.Validate(16000); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("mfcc shape and too-short input") {
  std::mt19937_64 rng(5);
  const auto sig = RandomSignal(rng, 16000);
  const auto f = Mfcc(sig, FrontendConfig{});
  CHECK(f.num_frames() == 98);
  CHECK(f.dim() == 39);

  const auto two_frames = RandomSignal(rng, 400 + 160);
  CHECK(ErrorOf([&] { Mfcc(two_frames, FrontendConfig{}); }) == ErrorCode::kTooShort);
  FrontendConfig no_deltas;
  no_deltas.append_deltas = false;
  CHECK(Mfcc(two_frames, no_deltas).num_frames() == 2);
  CHECK(ErrorOf([&] { Mfcc(RandomSignal(rng, 399), no_deltas); }) == ErrorCode::kTooShort);
}

TEST_CASE("mfcc equals the naive oracle") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 3; ++trial) {
    const auto sig = RandomSignal(rng, 4000);
    const auto f = Mfcc(sig, FrontendConfig{});
    const auto ref = oracle::NaiveMfcc(sig.samples, oracle::MfccParams{});
    REQUIRE(static_cast<int>(ref.size()) == f.num_frames());
    for (int t = 0; t < f.num_frames(); ++t)
      for (int d = 0; d < 39; ++d) CHECK(std::abs(f.Frame(t)[d] - ref[t][d]) < 1e-6);
  }
}

TEST_CASE("silent frames hit the log floor instead of -inf") {
  AudioSignal silence;
  silence.sample_rate_hz = 16000;
  silence.samples.assign(1600, 0.0);
  const auto f = Mfcc(silence, FrontendConfig{});
  for (double v : f.data()) CHECK(std::isfinite(v));
  CHECK(f.Frame(0)[0] == doctest::Approx(std::sqrt(26.0) * std::log(1e-10)));
}

TEST_CASE("stationary tone has near-zero deltas") {
  // Period of 80 samples divides the 160-sample shift: every frame is equal.
  AudioSignal tone;
  tone.sample_rate_hz = 16000;
  for (int n = 0; n < 8000; ++n) tone.samples.push_back(0.3 * std::sin(2 * std::numbers::pi * n / 80));
  FrontendConfig c;
  c.pre_emphasis = 0.0;
  const auto f = Mfcc(tone, c);
  for (int t = 0; t < f.num_frames(); ++t)
    for (int d = 13; d < 39; ++d) CHECK(std::abs(f.Frame(t)[d]) < 1e-9);
}

TEST_CASE("amplitude scaling shifts only c0") {
  std::mt19937_64 rng(8);
  const auto sig = RandomSignal(rng, 8000);
  auto scaled = sig;
  const double alpha = 0.3;
  for (auto& v : scaled.samples) v *= alpha;
  const auto a = Mfcc(sig, FrontendConfig{});
  const auto b = Mfcc(scaled, FrontendConfig{});
  const double shift = std::sqrt(26.0) * 2.0 * std::log(alpha);
  for (int t = 0; t < a.num_frames(); ++t) {
    CHECK(b.Frame(t)[0] - a.Frame(t)[0] == doctest::Approx(shift).epsilon(1e-9));
    for (int d = 1; d < 39; ++d) CHECK(std::abs(b.Frame(t)[d] - a.Frame(t)[d]) < 1e-6);
  }
}

TEST_CASE("cepstral mean normalization zeroes the static means") {
  std::mt19937_64 rng(9);
  FrontendConfig c;
  c.cepstral_mean_norm = true;
  const auto f = Mfcc(RandomSignal(rng, 8000), c);
  for (int d = 0; d < 13; ++d) {
    double mean = 0.0;
    for (int t = 0; t < f.num_frames(); ++t) mean += f.Frame(t)[d];
    CHECK(std::abs(mean / f.num_frames()) < 1e-9);
  }
}

TEST_CASE("batch extraction: serial and parallel agree bit for bit") {
  std::mt19937_64 rng(10);
  std::vector<AudioSignal> sigs;
  for (int i = 0; i < 6; ++i) sigs.push_back(RandomSignal(rng, 3000 + 500 * i));
  const auto serial = MfccBatch(sigs, FrontendConfig{}, Execution::kSerial);
  const auto parallel = MfccBatch(sigs, FrontendConfig{}, Execution::kParallel);
  CHECK(serial == parallel);
  CHECK(serial[3] == Mfcc(sigs[3], FrontendConfig{}));
}
