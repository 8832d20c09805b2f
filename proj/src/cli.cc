// src/cli.cc

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

#include "digitspeech/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>

#include "digitspeech/errors.h"
#include "digitspeech/pipeline.h"

namespace digitspeech {

namespace {

struct Overrides {
  std::string config;
  std::string model;
  std::string grammar;
  std::string dict;
  std::string fileids;
  std::string trans;
  std::string beam;
  int iters = -1;
  bool serial = false;
};

std::string Fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

SystemConfig ResolveConfig(const Overrides& o) {
  SystemConfig c;
  if (!o.config.empty()) c = LoadSystemConfig(o.config);
  auto set_path = [](const std::string& v, std::string& dst) {
    if (!v.empty()) dst = std::filesystem::path(v).lexically_normal().string();
  };
  set_path(o.model, c.paths.model);
  set_path(o.grammar, c.paths.grammar);
  set_path(o.dict, c.paths.dictionary);
  set_path(o.fileids, c.paths.manifest_fileids);
  set_path(o.trans, c.paths.manifest_trans);
  if (!o.beam.empty()) {
    if (o.beam == "inf" || o.beam == "unlimited") {
      c.decoder.beam_width_log = kUnlimitedBeam;
    } else {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(o.beam.data(), o.beam.data() + o.beam.size(), v);
      if (ec != std::errc() || ptr != o.beam.data() + o.beam.size())
        throw Error(ErrorCode::kConfigError, "--beam: not a number: " + o.beam);
      c.decoder.beam_width_log = v;
    }
  }
  if (o.iters >= 0) c.trainer.max_iterations = o.iters;
  c.trainer.Validate();
  c.decoder.Validate();
  return c;
}

Execution ExecOf(const Overrides& o) {
  return o.serial ? Execution::kSerial : Execution::kParallel;
}

AcousticModel RequireModel(const SystemConfig& c) {
  if (c.paths.model.empty()) throw Error(ErrorCode::kConfigError, "no model path configured");
  return LoadModel(c.paths.model);
}

CorpusManifest FilteredManifest(const SystemConfig& c, const std::vector<std::string>& speakers,
                                bool keep) {
  auto manifest = LoadManifest(c.paths);
  if (speakers.empty()) return manifest;
  return SelectSpeakers(manifest, {speakers.begin(), speakers.end()}, keep);
}

int RunValidate(const SystemConfig& c, std::ostream& out, std::ostream& err) {
  int errors = 0;
  auto check = [&](const std::string& what, const auto& body) {
    try {
      body();
    } catch (const Error& e) {
      err << what << ": " << e.what() << "\n";
      ++errors;
    }
  };

  std::optional<Lexicon> lexicon;
  check("dictionary", [&] {
    lexicon = LoadLexicon(c.paths);
    out << "dictionary: " << lexicon->entries().size() << " words, "
        << lexicon->phone_set().size() << " phones\n";
  });
  check("grammar", [&] {
    const WordFsa fsa = lexicon ? LoadGrammar(c.paths.grammar, *lexicon)
                                : LoadGrammar(c.paths.grammar);
    out << "grammar: " << fsa.num_states << " states, " << fsa.edges.size() << " edges\n";
  });
  if (!c.paths.model.empty() && std::filesystem::exists(c.paths.model)) {
    check("model", [&] {
      const auto model = LoadModel(c.paths.model);
      const auto violation = CheckInvariants(model, c.trainer.variance_floor);
      if (!violation.empty()) throw Error(ErrorCode::kSchemaError, violation);
      out << "model: " << model.phones.size() << " phones, dim " << model.feature_dim << "\n";
    });
  }

  std::optional<CorpusManifest> manifest;
  check("manifest", [&] {
    manifest = LoadManifest(c.paths);
    if (lexicon) manifest->CheckVocabulary(*lexicon);
    out << "manifest: " << manifest->entries.size() << " utterances\n";
  });
  if (manifest) {
    int ok = 0;
    for (const auto& e : manifest->entries) {
      check(e.utterance_id, [&] {
        const auto signal = LoadWav(WavPathOf(c.paths, e));
        ValidateRate(signal, kCorpusSampleRateHz);
        ++ok;
      });
    }
    out << "audio: " << ok << "/" << manifest->entries.size()
        << " files are 16 kHz 16-bit mono\n";
  }
  out << "validate: " << errors << " error" << (errors == 1 ? "" : "s") << "\n";
  return errors == 0 ? 0 : 1;
}

int RunFeatures(const SystemConfig& c, const std::string& wav, std::ostream& out) {
  const auto signal = LoadWav(wav);
  ValidateRate(signal, kCorpusSampleRateHz);
  const auto features = Mfcc(signal, c.frontend);
  out << "# " << signal.source_id << " frames " << features.num_frames() << " dim "
      << features.dim() << "\n";
  for (int t = 0; t < features.num_frames(); ++t) {
    out << t;
    for (double v : features.Frame(t)) out << " " << Fixed(v);
    out << "\n";
  }
  return 0;
}

int RunTrain(const SystemConfig& c, const std::vector<std::string>& holdout, Execution exec,
             std::ostream& out) {
  if (c.paths.model.empty()) throw Error(ErrorCode::kConfigError, "no model path configured");
  const auto lexicon = LoadLexicon(c.paths);
  const auto manifest = FilteredManifest(c, holdout, false);
  manifest.CheckVocabulary(lexicon);
  const auto audio = LoadCorpusAudio(manifest, c.paths, exec);
  const auto examples = ExtractExamples(manifest, audio, c.frontend, exec);
  out << "training on " << examples.size() << " utterances\n";
  const auto result = TrainModel(
      examples, lexicon, c.trainer, c.frontend,
      [&](const IterationStats& stats, const AcousticModel&) {
        out << FormatIterationLine(stats) << "\n";
        for (const auto& id : stats.skipped) out << "skipped " << id << "\n";
      },
      exec);
  SaveModel(result.model, c.paths.model);
  out << "wrote " << c.paths.model << "\n";
  return 0;
}

SearchGraph GraphFor(const SystemConfig& c, const Lexicon& lexicon, const AcousticModel& model) {
  const auto fsa = LoadGrammar(c.paths.grammar, lexicon);
  return BuildSearchGraph(fsa, lexicon, model, c.optional_silence,
                          c.decoder.word_insertion_penalty_log);
}

int RunDecode(const SystemConfig& c, const std::string& wav, bool use_manifest,
              const std::vector<std::string>& speakers, Execution exec, std::ostream& out) {
  const auto lexicon = LoadLexicon(c.paths);
  const auto model = RequireModel(c);
  const auto graph = GraphFor(c, lexicon, model);
  if (!use_manifest) {
    out << FormatHypothesis(DecodeFile(wav, model, graph, model.frontend, c.decoder)) << "\n";
    return 0;
  }
  const auto manifest = FilteredManifest(c, speakers, true);
  const auto audio = LoadCorpusAudio(manifest, c.paths, exec);
  const auto hyps = DecodeManifest(manifest, audio, model, graph, c.decoder, exec);
  for (const auto& e : manifest.entries) out << FormatHypothesis(hyps.at(e.utterance_id)) << "\n";
  return 0;
}

int RunEval(const SystemConfig& c, const std::vector<std::string>& speakers, Execution exec,
            std::ostream& out) {
  const auto lexicon = LoadLexicon(c.paths);
  const auto model = RequireModel(c);
  const auto graph = GraphFor(c, lexicon, model);
  const auto manifest = FilteredManifest(c, speakers, true);
  manifest.CheckVocabulary(lexicon);
  const auto audio = LoadCorpusAudio(manifest, c.paths, exec);
  const auto hyps = DecodeManifest(manifest, audio, model, graph, c.decoder, exec);
  out << FormatReport(Evaluate(manifest, HypothesisWords(hyps)));
  return 0;
}

int RunGraph(const SystemConfig& c, std::ostream& out) {
  const auto lexicon = LoadLexicon(c.paths);
  const auto model = RequireModel(c);
  const auto stats = GraphFor(c, lexicon, model).ComputeStats();
  out << "nodes " << stats.nodes << "\n"
      << "emitting " << stats.emitting << "\n"
      << "word_ends " << stats.word_ends << "\n"
      << "grammar " << stats.grammar << "\n"
      << "arcs " << stats.arcs << "\n"
      << "senones " << stats.senones << "\n";
  return 0;
}

int RunSynth(const SystemConfig& c, std::uint64_t seed, const SynthSpec& spec,
             const std::string& out_dir, std::ostream& out) {
  const auto lexicon = LoadLexicon(c.paths);
  const auto corpus = SynthesizeCorpus(seed, spec, lexicon, out_dir);
  out << "wrote " << corpus.manifest.entries.size() << " utterances to " << out_dir << "\n"
      << "fileids " << corpus.fileids.string() << "\n"
      << "transcription " << corpus.transcription.string() << "\n"
      << "speakers " << corpus.speakers.string() << "\n";
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"digitspeech: small-vocabulary HMM speech recognizer", "digitspeech"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "system configuration file");
  app.add_option("--model", o.model, "acoustic model path");
  app.add_option("--grammar", o.grammar, "JSGF grammar path");
  app.add_option("--dict", o.dict, "pronunciation dictionary path");
  app.add_option("--manifest-fileids", o.fileids, "corpus fileids list");
  app.add_option("--manifest-trans", o.trans, "corpus transcription file");
  app.add_option("--beam", o.beam, "decoder beam (natural log, or 'inf')");
  app.add_option("--iters", o.iters, "maximum Baum-Welch iterations");
  app.add_flag("--serial", o.serial, "run the serial reference kernels");

  auto* validate = app.add_subcommand("validate", "check dictionary, grammar, manifest and audio");

  std::string wav;
  auto* features = app.add_subcommand("features", "print the MFCC table of a wav file");
  features->add_option("wav", wav, "16 kHz mono 16-bit wav")->required();

  std::vector<std::string> holdout;
  auto* train = app.add_subcommand("train", "flat start and Baum-Welch training");
  train->add_option("--holdout", holdout, "speakers to leave out")->delimiter(',');

  bool use_manifest = false;
  std::vector<std::string> speakers;
  auto* decode = app.add_subcommand("decode", "decode a wav file or the manifest");
  decode->add_option("wav", wav, "wav file");
  decode->add_flag("--manifest", use_manifest, "decode every manifest utterance");
  decode->add_option("--speaker", speakers, "restrict to these speakers")->delimiter(',');

  auto* eval = app.add_subcommand("eval", "decode the manifest and print recognition rates");
  eval->add_option("--speaker", speakers, "restrict to these speakers")->delimiter(',');

  bool stats = false;
  auto* graph = app.add_subcommand("graph", "inspect the search graph");
  graph->add_flag("--stats", stats, "print node and arc counts");

  std::uint64_t seed = 7;
  std::string out_dir = "synth";
  SynthSpec spec;
  auto* synth = app.add_subcommand("synth", "write a synthetic digit corpus");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--out", out_dir, "output directory");
  synth->add_option("--speakers", spec.num_speakers)->check(CLI::PositiveNumber);
  synth->add_option("--repetitions", spec.num_repetitions)->check(CLI::PositiveNumber);
  synth->add_option("--digits", spec.num_digits)->check(CLI::Range(1, 10));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    const SystemConfig config = ResolveConfig(o);
    const Execution exec = ExecOf(o);
    if (validate->parsed()) return RunValidate(config, out, err);
    if (features->parsed()) return RunFeatures(config, wav, out);
    if (train->parsed()) return RunTrain(config, holdout, exec, out);
    if (decode->parsed()) {
      if (use_manifest == !wav.empty()) {
        err << "error: decode needs exactly one of <wav> or --manifest\n" << decode->help();
        return 1;
      }
      return RunDecode(config, wav, use_manifest, speakers, exec, out);
    }
    if (eval->parsed()) return RunEval(config, speakers, exec, out);
    if (graph->parsed()) {
      if (!stats) {
        err << "error: graph needs --stats\n" << graph->help();
        return 1;
      }
      return RunGraph(config, out);
    }
    if (synth->parsed()) return RunSynth(config, seed, spec, out_dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace digitspeech
