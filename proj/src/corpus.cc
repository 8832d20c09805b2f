// src/corpus.cc

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

#include "digitspeech/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "digitspeech/errors.h"

namespace digitspeech {

namespace {

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = end + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string BaseName(std::string_view path) {
  const auto slash = path.find_last_of('/');
  return std::string(slash == std::string_view::npos ? path : path.substr(slash + 1));
}

// Trial index from "..._t<k>..." or -1.
int TrialOf(std::string_view utterance_id) {
  std::size_t pos = 0;
  while ((pos = utterance_id.find("_t", pos)) != std::string_view::npos) {
    pos += 2;
    int value = 0;
    auto [ptr, ec] = std::from_chars(utterance_id.data() + pos,
                                     utterance_id.data() + utterance_id.size(), value);
    if (ec == std::errc() && (ptr == utterance_id.data() + utterance_id.size() || *ptr == '_'))
      return value;
  }
  return -1;
}

std::string Hundredths(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

char SexLetter(Sex sex) {
  switch (sex) {
    case Sex::kMale: return 'M';
    case Sex::kFemale: return 'W';
    default: return '?';
  }
}

const ManifestEntry* CorpusManifest::Find(std::string_view utterance_id) const {
  for (const auto& e : entries)
    if (e.utterance_id == utterance_id) return &e;
  return nullptr;
}

void CorpusManifest::CheckVocabulary(const Lexicon& lexicon) const {
  for (const auto& e : entries)
    for (const auto& w : e.transcript)
      if (!lexicon.Contains(w))
        throw Error(ErrorCode::kOutOfVocabulary,
                    e.utterance_id + ": word '" + w + "' is not in the dictionary");
}

std::string SpeakerOf(std::string_view utterance_id) {
  return std::string(utterance_id.substr(0, utterance_id.find('_')));
}

CorpusManifest ParseManifest(std::string_view fileids_text,
                             std::string_view transcription_text,
                             std::string_view speakers_text) {
  std::map<std::string, Sex> sexes;
  {
    int line_no = 0;
    for (auto line : Lines(speakers_text)) {
      ++line_no;
      const auto tokens = SplitWords(line);
      if (tokens.empty() || tokens[0][0] == '#') continue;
      if (tokens.size() != 2 || (tokens[1] != "M" && tokens[1] != "W"))
        throw Error(ErrorCode::kConfigError, "speaker line must be '<speaker> <M|W>'", line_no);
      sexes[tokens[0]] = tokens[1] == "M" ? Sex::kMale : Sex::kFemale;
    }
  }

  std::map<std::string, std::vector<std::string>> transcripts;
  std::vector<std::string> transcript_order;
  int line_no = 0;
  for (auto raw : Lines(transcription_text)) {
    ++line_no;
    const auto line = Trim(raw);
    if (line.empty()) continue;
    const auto open = line.rfind('(');
    if (open == std::string_view::npos || line.back() != ')')
      throw Error(ErrorCode::kBadTranscriptLine, "missing '(utterance_id)'", line_no);
    const std::string id(Trim(line.substr(open + 1, line.size() - open - 2)));
    if (id.empty()) throw Error(ErrorCode::kBadTranscriptLine, "empty utterance id", line_no);
    auto words = SplitWords(line.substr(0, open));
    if (words.size() < 2 || words.front() != "<s>" || words.back() != "</s>")
      throw Error(ErrorCode::kBadTranscriptLine, "expected '<s> WORDS </s>'", line_no);
    words.erase(words.begin());
    words.pop_back();
    if (words.empty()) throw Error(ErrorCode::kBadTranscriptLine, "empty transcript", line_no);
    if (!transcripts.emplace(id, std::move(words)).second)
      throw Error(ErrorCode::kBadTranscriptLine, "duplicate utterance id '" + id + "'", line_no);
    transcript_order.push_back(id);
  }

  CorpusManifest manifest;
  std::set<std::string> seen;
  line_no = 0;
  for (auto raw : Lines(fileids_text)) {
    ++line_no;
    const auto line = Trim(raw);
    if (line.empty()) continue;
    const std::string id = BaseName(line);
    auto it = transcripts.find(id);
    if (it == transcripts.end())
      throw Error(ErrorCode::kOrphanFileid, "fileid '" + std::string(line) + "' has no transcript",
                  line_no);
    if (!seen.insert(id).second)
      throw Error(ErrorCode::kOrphanFileid, "utterance '" + id + "' listed twice", line_no);
    ManifestEntry e;
    e.utterance_id = id;
    e.wav_path = std::string(line);
    e.transcript = it->second;
    e.speaker_id = SpeakerOf(id);
    auto sx = sexes.find(e.speaker_id);
    e.speaker_sex = sx == sexes.end() ? Sex::kUnknown : sx->second;
    manifest.entries.push_back(std::move(e));
  }
  for (const auto& id : transcript_order)
    if (!seen.count(id))
      throw Error(ErrorCode::kOrphanTranscript, "transcript '" + id + "' has no fileid");
  return manifest;
}

double TruncateToHundredths(double value) {
  return std::floor(value * 100.0 + 1e-9) / 100.0;
}

bool EvalReport::operator==(const EvalReport& o) const {
  if (speakers.size() != o.speakers.size() || groups.size() != o.groups.size()) return false;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    const auto& a = speakers[i];
    const auto& b = o.speakers[i];
    if (a.speaker_id != b.speaker_id || a.sex != b.sex || a.correct != b.correct ||
        a.total != b.total || a.correct_per_trial != b.correct_per_trial ||
        a.total_per_trial != b.total_per_trial || a.rate != b.rate)
      return false;
  }
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i].sex != o.groups[i].sex || groups[i].mean_rate != o.groups[i].mean_rate ||
        groups[i].num_speakers != o.groups[i].num_speakers)
      return false;
  return correct == o.correct && total == o.total && overall_rate == o.overall_rate;
}

EvalReport Evaluate(const CorpusManifest& manifest,
                    const std::map<std::string, std::vector<std::string>>& hypotheses) {
  std::map<std::string, SpeakerResult> by_speaker;
  EvalReport report;
  for (const auto& e : manifest.entries) {
    auto it = hypotheses.find(e.utterance_id);
    if (it == hypotheses.end())
      throw Error(ErrorCode::kMissingHypothesis, "no hypothesis for '" + e.utterance_id + "'");
    const bool ok = it->second == e.transcript;
    auto& sr = by_speaker[e.speaker_id];
    sr.speaker_id = e.speaker_id;
    sr.sex = e.speaker_sex;
    sr.total += 1;
    sr.correct += ok ? 1 : 0;
    const int trial = TrialOf(e.utterance_id);
    if (trial >= 0) {
      sr.total_per_trial[trial] += 1;
      sr.correct_per_trial[trial] += ok ? 1 : 0;
    }
    report.total += 1;
    report.correct += ok ? 1 : 0;
  }

  // Integer-exact rates; floor division gives the truncated hundredths.
  auto rate_of = [](int correct, int total) { return 100.0 * correct / total; };
  auto reported = [](int correct, int total) {
    return static_cast<double>((10000L * correct) / total) / 100.0;
  };
  for (auto& [id, sr] : by_speaker) {
    sr.rate = rate_of(sr.correct, sr.total);
    sr.reported_rate = reported(sr.correct, sr.total);
    report.speakers.push_back(sr);
  }
  for (Sex sex : {Sex::kMale, Sex::kFemale}) {
    GroupResult g;
    g.sex = sex;
    double sum = 0.0;
    for (const auto& sr : report.speakers)
      if (sr.sex == sex) {
        ++g.num_speakers;
        sum += sr.rate;
      }
    if (g.num_speakers == 0) continue;
    g.mean_rate = sum / g.num_speakers;
    g.reported_mean_rate = TruncateToHundredths(g.mean_rate);
    report.groups.push_back(g);
  }
  if (report.total > 0) {
    report.overall_rate = rate_of(report.correct, report.total);
    report.reported_overall_rate = reported(report.correct, report.total);
  }
  return report;
}

std::string FormatReport(const EvalReport& report) {
  std::set<int> trials;
  for (const auto& sr : report.speakers)
    for (const auto& [t, n] : sr.total_per_trial) trials.insert(t);

  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-10s", "Speaker");
  out << buf;
  for (int t : trials) {
    std::snprintf(buf, sizeof(buf), " %8s", ("Trial" + std::to_string(t)).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), " %15s %8s\n", "Correct/Total", "Rate%");
  out << buf;
  for (const auto& sr : report.speakers) {
    std::snprintf(buf, sizeof(buf), "%-10s", sr.speaker_id.c_str());
    out << buf;
    for (int t : trials) {
      auto it = sr.correct_per_trial.find(t);
      std::snprintf(buf, sizeof(buf), " %8s",
                    it == sr.correct_per_trial.end() ? "-" : std::to_string(it->second).c_str());
      out << buf;
    }
    const std::string frac = std::to_string(sr.correct) + "/" + std::to_string(sr.total);
    std::snprintf(buf, sizeof(buf), " %15s %8s\n", frac.c_str(), Hundredths(sr.reported_rate).c_str());
    out << buf;
  }
  out << "\n";
  std::snprintf(buf, sizeof(buf), "%-10s %8s %8s\n", "Group", "Speakers", "Rate%");
  out << buf;
  for (const auto& g : report.groups) {
    std::snprintf(buf, sizeof(buf), "%-10c %8d %8s\n", SexLetter(g.sex), g.num_speakers,
                  Hundredths(g.reported_mean_rate).c_str());
    out << buf;
  }
  const std::string frac = std::to_string(report.correct) + "/" + std::to_string(report.total);
  std::snprintf(buf, sizeof(buf), "%-10s %8s %8s\n", "Overall", frac.c_str(),
                Hundredths(report.reported_overall_rate).c_str());
  out << buf;
  return out.str();
}

namespace {

struct ConfigLine {
  int line;
  std::string value;
};

class ConfigReader {
 public:
  ConfigReader(std::string_view text) {
    int line_no = 0;
    for (auto raw : Lines(text)) {
      ++line_no;
      auto line = Trim(raw);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw Error(ErrorCode::kConfigError, "expected 'section.key = value'", line_no);
      const std::string key(Trim(line.substr(0, eq)));
      const std::string value(Trim(line.substr(eq + 1)));
      if (key.find('.') == std::string::npos)
        throw Error(ErrorCode::kConfigError, "key '" + key + "' lacks a section", line_no);
      if (!values_.emplace(key, ConfigLine{line_no, value}).second)
        throw Error(ErrorCode::kConfigError, "key '" + key + "' set twice", line_no);
    }
  }

  void Real(const std::string& key, double& out) {
    Take(key, [&](const ConfigLine& l) {
      if (l.value == "unlimited" || l.value == "inf") {
        out = std::numeric_limits<double>::infinity();
        return;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(l.value.data(), l.value.data() + l.value.size(), v);
      if (ec != std::errc() || ptr != l.value.data() + l.value.size())
        throw Error(ErrorCode::kConfigError, key + ": not a number", l.line);
      out = v;
    });
  }

  void Integer(const std::string& key, int& out) {
    Take(key, [&](const ConfigLine& l) {
      if (l.value == "unlimited") {
        out = std::numeric_limits<int>::max();
        return;
      }
      int v = 0;
      auto [ptr, ec] = std::from_chars(l.value.data(), l.value.data() + l.value.size(), v);
      if (ec != std::errc() || ptr != l.value.data() + l.value.size())
        throw Error(ErrorCode::kConfigError, key + ": not an integer", l.line);
      out = v;
    });
  }

  void Bool(const std::string& key, bool& out) {
    Take(key, [&](const ConfigLine& l) {
      if (l.value == "true" || l.value == "1" || l.value == "yes") {
        out = true;
      } else if (l.value == "false" || l.value == "0" || l.value == "no") {
        out = false;
      } else {
        throw Error(ErrorCode::kConfigError, key + ": expected true or false", l.line);
      }
    });
  }

  void Path(const std::string& key, const std::filesystem::path& base, std::string& out) {
    Take(key, [&](const ConfigLine& l) {
      std::filesystem::path p(l.value);
      out = (p.is_absolute() ? p : base / p).lexically_normal().string();
    });
  }

  void RejectLeftovers() const {
    if (!values_.empty()) {
      const auto& [key, l] = *values_.begin();
      throw Error(ErrorCode::kConfigError, "unknown key '" + key + "'", l.line);
    }
  }

 private:
  void Take(const std::string& key, const std::function<void(const ConfigLine&)>& apply) {
    auto it = values_.find(key);
    if (it == values_.end()) return;
    apply(it->second);
    values_.erase(it);
  }

  std::map<std::string, ConfigLine> values_;
};

}  // namespace

SystemConfig ParseSystemConfig(std::string_view text, const std::filesystem::path& base_dir) {
  ConfigReader r(text);
  SystemConfig c;
  auto& fe = c.frontend;
  r.Real("frontend.frame_length_ms", fe.frame_length_ms);
  r.Real("frontend.frame_shift_ms", fe.frame_shift_ms);
  r.Real("frontend.pre_emphasis", fe.pre_emphasis);
  r.Integer("frontend.num_mel_filters", fe.num_mel_filters);
  r.Integer("frontend.num_cepstra", fe.num_cepstra);
  r.Integer("frontend.fft_size", fe.fft_size);
  r.Real("frontend.low_freq_hz", fe.low_freq_hz);
  r.Real("frontend.high_freq_hz", fe.high_freq_hz);
  r.Bool("frontend.append_deltas", fe.append_deltas);
  r.Bool("frontend.cepstral_mean_norm", fe.cepstral_mean_norm);

  auto& tr = c.trainer;
  r.Integer("trainer.max_iterations", tr.max_iterations);
  r.Real("trainer.convergence_rel_tol", tr.convergence_rel_tol);
  r.Real("trainer.variance_floor", tr.variance_floor);
  r.Integer("trainer.target_mixtures", tr.target_mixtures);
  r.Bool("trainer.add_optional_silence", tr.add_optional_silence);
  r.Integer("trainer.states_per_phone", tr.states_per_phone);

  auto& de = c.decoder;
  r.Real("decoder.beam_width_log", de.beam_width_log);
  r.Real("decoder.word_insertion_penalty_log", de.word_insertion_penalty_log);
  r.Integer("decoder.max_active", de.max_active);
  r.Bool("decoder.optional_silence", c.optional_silence);

  auto& p = c.paths;
  r.Path("paths.phones", base_dir, p.phones);
  r.Path("paths.dictionary", base_dir, p.dictionary);
  r.Path("paths.grammar", base_dir, p.grammar);
  r.Path("paths.model", base_dir, p.model);
  r.Path("paths.manifest_fileids", base_dir, p.manifest_fileids);
  r.Path("paths.manifest_trans", base_dir, p.manifest_trans);
  r.Path("paths.speakers", base_dir, p.speakers);
  r.Path("paths.wav_dir", base_dir, p.wav_dir);
  r.RejectLeftovers();

  tr.Validate();
  de.Validate();
  return c;
}

SystemConfig LoadSystemConfig(const std::filesystem::path& path) {
  return ParseSystemConfig(ReadTextFile(path), path.parent_path());
}

std::vector<double> SynthPhoneFrequencies(const PhoneSet& phones, std::string_view phone) {
  if (phone == kSilencePhone) return {};
  const int i = phones.IndexOf(phone);
  if (i < 0) throw Error(ErrorCode::kUnknownPhone, "unknown phone '" + std::string(phone) + "'");
  const int n = static_cast<int>(phones.size());
  std::vector<double> f;
  f.push_back(250.0 + 170.0 * i);
  f.push_back(4200.0 + 110.0 * ((i * 7) % n));
  if (i % 2 == 1) f.push_back(6000.0 + 80.0 * ((i * 5) % n));
  return f;
}

AudioSignal SynthesizeUtterance(const std::vector<std::string>& phones, const PhoneSet& phone_set,
                                double frequency_scale, double gain, std::uint64_t noise_seed,
                                const SynthSpec& spec, std::string source_id) {
  static constexpr double kAmplitudes[] = {0.4, 0.2, 0.1};
  constexpr double kNoiseStd = 0.003;
  constexpr double kRampMs = 5.0;
  const int sr = spec.sample_rate_hz;
  const auto phone_len = static_cast<std::size_t>(std::lround(spec.phone_ms * sr / 1000.0));
  const auto pad_len = static_cast<std::size_t>(std::lround(spec.padding_ms * sr / 1000.0));
  const auto ramp = static_cast<std::size_t>(std::lround(kRampMs * sr / 1000.0));

  AudioSignal sig;
  sig.sample_rate_hz = sr;
  sig.source_id = std::move(source_id);
  sig.samples.assign(2 * pad_len + phones.size() * phone_len, 0.0);
  for (std::size_t p = 0; p < phones.size(); ++p) {
    const auto freqs = SynthPhoneFrequencies(phone_set, phones[p]);
    const std::size_t base = pad_len + p * phone_len;
    for (std::size_t n = 0; n < phone_len; ++n) {
      double env = 1.0;
      if (n < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * n / ramp);
      if (phone_len - 1 - n < ramp)
        env = std::min(env, 0.5 - 0.5 * std::cos(std::numbers::pi * (phone_len - 1 - n) / ramp));
      double v = 0.0;
      for (std::size_t k = 0; k < freqs.size(); ++k)
        v += kAmplitudes[k] *
             std::sin(2.0 * std::numbers::pi * freqs[k] * frequency_scale * n / sr);
      sig.samples[base + n] = gain * env * v;
    }
  }
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, kNoiseStd);
  for (auto& x : sig.samples) x = std::clamp(x + noise(rng), -1.0, 32767.0 / 32768.0);
  return sig;
}

SynthCorpus SynthesizeCorpus(std::uint64_t seed, const SynthSpec& spec, const Lexicon& lexicon,
                             const std::filesystem::path& out_dir) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale_dist(0.98, 1.02);
  std::uniform_real_distribution<double> gain_dist(0.5, 0.9);

  std::error_code ec;
  std::filesystem::create_directories(out_dir / "wav", ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + (out_dir / "wav").string());

  SynthCorpus corpus;
  std::string fileids, trans, speakers;
  const int num_male = (spec.num_speakers + 1) / 2;
  for (int k = 1; k <= spec.num_speakers; ++k) {
    const double scale = scale_dist(rng);
    const double gain = gain_dist(rng);
    const std::string spk = "spk" + std::to_string(k);
    const Sex sex = k <= num_male ? Sex::kMale : Sex::kFemale;
    speakers += spk + " " + SexLetter(sex) + "\n";
    std::filesystem::create_directories(out_dir / "wav" / spk, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create directory for " + spk);
    for (int d = 0; d < spec.num_digits; ++d) {
      const std::string word = std::to_string(d);
      const auto& pron = lexicon.Lookup(word);
      for (int r = 1; r <= spec.num_repetitions; ++r) {
        const std::string id = spk + "_d" + word + "_t" + std::to_string(r);
        const std::uint64_t token_seed =
            SplitMix(seed ^ SplitMix(static_cast<std::uint64_t>(k) * 1000003ULL +
                                     static_cast<std::uint64_t>(d) * 1009ULL + r));
        const auto sig =
            SynthesizeUtterance(pron, lexicon.phone_set(), scale, gain, token_seed, spec, id);
        const std::string rel = "wav/" + spk + "/" + id;
        WriteWav(sig, out_dir / (rel + ".wav"));
        fileids += rel + "\n";
        trans += "<s> " + word + " </s> (" + id + ")\n";
        ManifestEntry e;
        e.utterance_id = id;
        e.wav_path = rel;
        e.transcript = {word};
        e.speaker_id = spk;
        e.speaker_sex = sex;
        corpus.manifest.entries.push_back(std::move(e));
      }
    }
  }
  corpus.fileids = out_dir / "corpus.fileids";
  corpus.transcription = out_dir / "corpus.transcription";
  corpus.speakers = out_dir / "speakers.txt";
  WriteTextFile(corpus.fileids, fileids);
  WriteTextFile(corpus.transcription, trans);
  WriteTextFile(corpus.speakers, speakers);
  return corpus;
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace digitspeech
