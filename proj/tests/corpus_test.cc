// tests/corpus_test.cc

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "digitspeech/audio_io.h"
#include "digitspeech/corpus.h"
#include "expect_error.h"
#include "oracles.h"
#include "six_speaker_mock.h"

using namespace digitspeech;

namespace {

const std::string kAssets = DIGITSPEECH_ASSET_DIR;

std::filesystem::path ScratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("digitspeech_corpus_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

Lexicon DigitLexicon() {
  return ParseDictionary(ReadTextFile(kAssets + "/arabic_digits.dict"), PhoneSet::ArabicDigits());
}

}  // namespace

TEST_CASE("manifest join") {
  const auto m = ParseManifest(
      "wav/spk1/spk1_d3_t1\nwav/spk2/spk2_d4_t1\n",
      "<s> 4 </s> (spk2_d4_t1)\n\n<s> 3 </s> (spk1_d3_t1)\n", "spk1 M\nspk2 W\n");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].utterance_id == "spk1_d3_t1");
  CHECK(m.entries[0].wav_path == "wav/spk1/spk1_d3_t1");
  CHECK(m.entries[0].transcript == std::vector<std::string>{"3"});
  CHECK(m.entries[0].speaker_sex == Sex::kMale);
  CHECK(m.entries[1].speaker_id == "spk2");
  CHECK(m.entries[1].speaker_sex == Sex::kFemale);
  CHECK(m.Find("spk2_d4_t1") == &m.entries[1]);
  CHECK(m.Find("nope") == nullptr);
  CHECK(SpeakerOf("spk2_d4_t2") == "spk2");
  CHECK(SpeakerOf("plain") == "plain");

  const auto no_sex = ParseManifest("a_1\n", "<s> 1 2 </s> (a_1)\n");
  CHECK(no_sex.entries[0].speaker_sex == Sex::kUnknown);
  CHECK(no_sex.entries[0].transcript == std::vector<std::string>{"1", "2"});

  CHECK_NOTHROW(no_sex.CheckVocabulary(DigitLexicon()));
  const auto oov = ParseManifest("a_1\n", "<s> 11 </s> (a_1)\n");
  CHECK(ErrorOf([&] { oov.CheckVocabulary(DigitLexicon()); }) == ErrorCode::kOutOfVocabulary);
}

TEST_CASE("manifest errors") {
  CHECK(ErrorOf([] { ParseManifest("a\nb\n", "<s> 1 </s> (a)\n"); }) == ErrorCode::kOrphanFileid);
  CHECK(ErrorOf([] { ParseManifest("a\n", "<s> 1 </s> (a)\n<s> 2 </s> (b)\n"); }) ==
        ErrorCode::kOrphanTranscript);
  try {
    ParseManifest("a\n", "<s> 1 </s> (a)\n1 2 (b)\n");
    FAIL("expected BadTranscriptLine");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBadTranscriptLine);
    CHECK(e.line() == 2);
  }
  CHECK(ErrorOf([] { ParseManifest("a\n", "<s> 1 </s>\n"); }) == ErrorCode::kBadTranscriptLine);
}

TEST_CASE("truncation to hundredths") {
  CHECK(TruncateToHundredths(100.0 * 26 / 30) == doctest::Approx(86.66));
  CHECK(TruncateToHundredths(100.0 * 25 / 30) == doctest::Approx(83.33));
  CHECK(TruncateToHundredths(80.0) == doctest::Approx(80.0));
  CHECK(TruncateToHundredths(100.0) == doctest::Approx(100.0));
  CHECK(TruncateToHundredths(0.29 * 100.0) == doctest::Approx(29.0));  // 28.999999999999996
  CHECK(TruncateToHundredths(12.349999) == doctest::Approx(12.34));
}

TEST_CASE("six-speaker evaluation arithmetic") {
  const auto mock = testing_util::SixSpeakerMock();
  const auto report = Evaluate(mock.manifest, mock.hypotheses);
  const std::vector<double> want{86.66, 86.66, 83.33, 83.33, 80.00, 86.66};
  REQUIRE(report.speakers.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(report.speakers[i].reported_rate - want[i]) <= 0.005);
    CHECK(report.speakers[i].total == 30);
    CHECK(report.speakers[i].correct_per_trial.size() == 3);
  }
  CHECK(report.speakers[0].correct_per_trial.at(2) == 8);
  REQUIRE(report.groups.size() == 2);
  CHECK(report.groups[0].sex == Sex::kMale);
  CHECK(report.groups[0].num_speakers == 3);
  CHECK(report.groups[0].mean_rate == doctest::Approx(770.0 / 9.0));
  CHECK(report.groups[0].reported_mean_rate == doctest::Approx(85.55));
  CHECK(report.groups[1].reported_mean_rate == doctest::Approx(83.33));
  CHECK(report.correct == 152);
  CHECK(report.total == 180);
  CHECK(report.reported_overall_rate == doctest::Approx(84.44));

  const auto text = FormatReport(report);
  CHECK(text.find("Trial1") != std::string::npos);
  CHECK(text.find("26/30") != std::string::npos);
  CHECK(text.find("86.66") != std::string::npos);
  CHECK(text.find("85.55") != std::string::npos);
  CHECK(text.find("152/180") != std::string::npos);
}

TEST_CASE("evaluation ignores manifest order") {
  const auto mock = testing_util::SixSpeakerMock();
  const auto base = Evaluate(mock.manifest, mock.hypotheses);
  std::mt19937_64 rng(61);
  for (int i = 0; i < 10; ++i) {
    auto shuffled = mock.manifest;
    std::shuffle(shuffled.entries.begin(), shuffled.entries.end(), rng);
    CHECK(Evaluate(shuffled, mock.hypotheses) == base);
  }
}

TEST_CASE("evaluation edge cases") {
  auto mock = testing_util::SixSpeakerMock();
  // Extra words or an empty hypothesis are both wrong.
  mock.hypotheses["M1_d0_t1"] = {"0", "0"};
  mock.hypotheses["M1_d1_t1"] = {};
  CHECK(Evaluate(mock.manifest, mock.hypotheses).speakers[0].correct == 24);
  mock.hypotheses.erase("W3_d5_t3");
  CHECK(ErrorOf([&] { Evaluate(mock.manifest, mock.hypotheses); }) ==
        ErrorCode::kMissingHypothesis);
}

TEST_CASE("shipped configuration") {
  const auto cfg = LoadSystemConfig(kAssets + "/digits.cfg");
  CHECK(cfg.frontend.num_cepstra == 13);
  CHECK(cfg.frontend.append_deltas);
  CHECK(cfg.trainer.states_per_phone == 3);
  CHECK(cfg.decoder.beam_width_log == 200.0);
  CHECK(cfg.optional_silence);
  const auto assets = std::filesystem::weakly_canonical(kAssets);
  CHECK(std::filesystem::path(cfg.paths.dictionary) == assets / "arabic_digits.dict");
  CHECK(std::filesystem::path(cfg.paths.grammar) == assets / "arabicdigits.gram");
}

TEST_CASE("configuration parsing") {
  const auto cfg = ParseSystemConfig(
      "# comment\n"
      "decoder.beam_width_log = inf\n"
      "decoder.max_active = unlimited\n"
      "decoder.optional_silence = false\n"
      "paths.model = /abs/x.am\n"
      "paths.grammar = sub/g.gram\n",
      "/base");
  CHECK(std::isinf(cfg.decoder.beam_width_log));
  CHECK(cfg.decoder.max_active == kUnlimitedActive);
  CHECK_FALSE(cfg.optional_silence);
  CHECK(cfg.paths.model == "/abs/x.am");
  CHECK(cfg.paths.grammar == "/base/sub/g.gram");
  CHECK(cfg.frontend.fft_size == FrontendConfig{}.fft_size);

  for (const char* bad : {"frontend.colour = red\n", "frontend.fft_size = 5x\n",
                          "decoder.optional_silence = maybe\n", "no equals sign\n",
                          "nosection = 1\n", "frontend.fft_size = 1\nfrontend.fft_size = 2\n"})
    CHECK(ErrorOf([&] { ParseSystemConfig(bad, "/"); }) == ErrorCode::kConfigError);
  try {
    ParseSystemConfig("\n# x\ntrainer.variance_floor = abc\n", "/");
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("synthetic phones put their energy at the assigned tone") {
  const auto phones = PhoneSet::ArabicDigits();
  CHECK(SynthPhoneFrequencies(phones, "SIL").empty());
  CHECK(ErrorOf([&] { SynthPhoneFrequencies(phones, "Q"); }) == ErrorCode::kUnknownPhone);
  SynthSpec spec;
  const int n = 1024;
  for (const char* p : {"AA", "KH", "SS", "E"}) {
    const auto freqs = SynthPhoneFrequencies(phones, p);
    REQUIRE(freqs.size() >= 2);
    for (double scale : {1.0, 1.02}) {
      const auto sig = SynthesizeUtterance({p}, phones, scale, 0.8, 3, spec, "x");
      CHECK(sig.sample_rate_hz == 16000);
      const int pad = static_cast<int>(spec.padding_ms * 16);
      const int len = static_cast<int>(spec.phone_ms * 16);
      CHECK(static_cast<int>(sig.samples.size()) == 2 * pad + len);
      const std::vector<double> mid(sig.samples.begin() + pad + (len - n) / 2,
                                    sig.samples.begin() + pad + (len - n) / 2 + n);
      const auto power = oracle::NaivePowerSpectrum(mid, n);
      const auto peak = std::max_element(power.begin(), power.end()) - power.begin();
      CHECK(std::abs(peak * 16000.0 / n - freqs[0] * scale) <= 16000.0 / n);

      double pad_energy = 0.0, phone_energy = 0.0;
      for (int i = 0; i < pad; ++i) pad_energy += sig.samples[i] * sig.samples[i];
      for (int i = pad; i < pad + len; ++i) phone_energy += sig.samples[i] * sig.samples[i];
      CHECK(pad_energy / pad < 1e-3 * phone_energy / len);
    }
  }
}

TEST_CASE("corpus synthesis is deterministic in the seed") {
  const auto lex = DigitLexicon();
  SynthSpec spec;
  spec.num_speakers = 2;
  spec.num_repetitions = 2;
  const auto a_dir = ScratchDir("a"), b_dir = ScratchDir("b"), c_dir = ScratchDir("c");
  const auto a = SynthesizeCorpus(7, spec, lex, a_dir);
  const auto b = SynthesizeCorpus(7, spec, lex, b_dir);
  const auto c = SynthesizeCorpus(8, spec, lex, c_dir);
  REQUIRE(a.manifest.entries.size() == 40);
  CHECK(ReadTextFile(a.fileids) == ReadTextFile(b.fileids));
  CHECK(ReadTextFile(a.speakers) == "spk1 M\nspk2 W\n");

  const auto again = ParseManifest(ReadTextFile(a.fileids), ReadTextFile(a.transcription),
                                   ReadTextFile(a.speakers));
  CHECK(again.entries.size() == 40);
  int differing = 0;
  for (const auto& e : a.manifest.entries) {
    CHECK(e.transcript.size() == 1);
    CHECK(e.utterance_id.find("_d" + e.transcript[0] + "_t") != std::string::npos);
    const auto wa = ReadTextFile(a_dir / (e.wav_path + ".wav"));
    CHECK(wa == ReadTextFile(b_dir / (e.wav_path + ".wav")));
    differing += wa != ReadTextFile(c_dir / (e.wav_path + ".wav"));
    CHECK(LoadWav(a_dir / (e.wav_path + ".wav")).sample_rate_hz == 16000);
  }
  CHECK(differing == 40);
  for (const auto& d : {a_dir, b_dir, c_dir}) std::filesystem::remove_all(d);
}

TEST_CASE("default synthesis spec yields 300 utterances") {
  const auto lex = DigitLexicon();
  const auto dir = ScratchDir("full");
  const auto corpus = SynthesizeCorpus(7, SynthSpec{}, lex, dir);
  CHECK(corpus.manifest.entries.size() == 300);
  int male = 0;
  for (const auto& e : corpus.manifest.entries) male += e.speaker_sex == Sex::kMale;
  CHECK(male == 150);
  std::filesystem::remove_all(dir);
}
