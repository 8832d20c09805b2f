// src/acoustic_model.cc

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

#include "digitspeech/acoustic_model.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "digitspeech/errors.h"

namespace digitspeech {

namespace {

constexpr std::string_view kMagic = "DIGITSPEECH-AM";
constexpr std::string_view kVersion = "v1";

double LogSumExp(std::span<const double> xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return kMinLogDensity;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - mx);
  return mx + std::log(sum);
}

std::string FormatReal(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

[[noreturn]] void Schema(const std::string& what) {
  throw Error(ErrorCode::kSchemaError, what);
}

class TokenReader {
 public:
  explicit TokenReader(std::string_view text) : text_(text) {}

  std::string_view Next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) Schema("unexpected end of model file");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  bool AtEnd() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return pos_ >= text_.size();
  }

  void Expect(std::string_view keyword) {
    const auto tok = Next();
    if (tok != keyword)
      Schema("expected '" + std::string(keyword) + "', found '" + std::string(tok) + "'");
  }

  double Real() {
    const auto tok = Next();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      Schema("expected a real number, found '" + std::string(tok) + "'");
    return v;
  }

  long Integer() {
    const auto tok = Next();
    long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      Schema("expected an integer, found '" + std::string(tok) + "'");
    return v;
  }

  double KeyedReal(std::string_view key) {
    Expect(key);
    return Real();
  }
  long KeyedInteger(std::string_view key) {
    Expect(key);
    return Integer();
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

HmmState::HmmState(std::vector<GaussianComponent> mixture) : mixture_(std::move(mixture)) {
  Precompute();
}

void HmmState::Precompute() {
  log_const_.clear();
  inv_variance_.clear();
  for (const auto& g : mixture_) {
    double c = std::log(g.weight) - 0.5 * g.mean.size() * std::log(2.0 * std::numbers::pi);
    std::vector<double> inv(g.variance.size());
    for (std::size_t d = 0; d < g.variance.size(); ++d) {
      c -= 0.5 * std::log(g.variance[d]);
      inv[d] = 1.0 / g.variance[d];
    }
    log_const_.push_back(c);
    inv_variance_.push_back(std::move(inv));
  }
}

void HmmState::ComponentLogLikelihoods(std::span<const double> observation,
                                       std::vector<double>& out) const {
  const int d_count = dim();
  if (static_cast<int>(observation.size()) != d_count)
    throw Error(ErrorCode::kDimensionMismatch,
                "observation of dim " + std::to_string(observation.size()) +
                    " scored against state of dim " + std::to_string(d_count));
  out.resize(mixture_.size());
  for (std::size_t m = 0; m < mixture_.size(); ++m) {
    const auto& mean = mixture_[m].mean;
    const auto& inv = inv_variance_[m];
    double quad = 0.0;
    for (int d = 0; d < d_count; ++d) {
      const double diff = observation[d] - mean[d];
      quad += diff * diff * inv[d];
    }
    out[m] = std::max(log_const_[m] - 0.5 * quad, kMinLogDensity);
  }
}

double HmmState::LogEmission(std::span<const double> observation) const {
  thread_local std::vector<double> scratch;
  ComponentLogLikelihoods(observation, scratch);
  if (scratch.size() == 1) return scratch[0];
  return std::max(LogSumExp(scratch), kMinLogDensity);
}

std::vector<double> LeftToRightTransitions(int num_states, double self_loop) {
  const int n = num_states + 1;
  std::vector<double> t(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < num_states; ++i) {
    t[static_cast<std::size_t>(i) * n + i] = self_loop;
    t[static_cast<std::size_t>(i) * n + i + 1] = 1.0 - self_loop;
  }
  t[static_cast<std::size_t>(num_states) * n + num_states] = 1.0;
  return t;
}

const PhoneHmm* AcousticModel::Find(std::string_view phone) const {
  auto it = phones.find(phone);
  return it == phones.end() ? nullptr : &it->second;
}

std::string CheckInvariants(const AcousticModel& model, double variance_floor,
                            double tolerance) {
  for (const auto& [name, hmm] : model.phones) {
    const std::string where = "phone " + name;
    if (hmm.phone != name) return where + ": name mismatch";
    if (hmm.states.empty()) return where + ": no states";
    const int s_count = hmm.num_states();
    if (hmm.transitions.size() != static_cast<std::size_t>((s_count + 1) * (s_count + 1)))
      return where + ": transition matrix has wrong shape";
    for (int i = 0; i <= s_count; ++i) {
      double row = 0.0;
      for (int j = 0; j <= s_count; ++j) {
        const double p = hmm.Transition(i, j);
        if (!(p >= 0.0) || p > 1.0) return where + ": transition out of [0,1]";
        const bool allowed = (j == i || j == i + 1);
        if (!allowed && p != 0.0)
          return where + ": non left-to-right transition " + std::to_string(i) + "->" +
                 std::to_string(j);
        row += p;
      }
      if (std::abs(row - 1.0) > tolerance)
        return where + ": transition row " + std::to_string(i) + " sums to " + FormatReal(row);
    }
    for (int s = 0; s < s_count; ++s) {
      const auto& mix = hmm.states[s].mixture();
      if (mix.empty()) return where + ": empty mixture";
      double wsum = 0.0;
      for (const auto& g : mix) {
        if (!(g.weight > 0.0)) return where + ": non-positive mixture weight";
        wsum += g.weight;
        if (static_cast<int>(g.mean.size()) != model.feature_dim ||
            static_cast<int>(g.variance.size()) != model.feature_dim)
          return where + ": component dimension differs from feature_dim";
        for (double v : g.variance)
          if (!(v >= variance_floor)) return where + ": variance below floor";
        for (double m : g.mean)
          if (!std::isfinite(m)) return where + ": non-finite mean";
      }
      if (std::abs(wsum - 1.0) > tolerance)
        return where + ": mixture weights sum to " + FormatReal(wsum);
    }
  }
  return "";
}

std::string SerializeModel(const AcousticModel& model) {
  std::ostringstream out;
  const auto& fe = model.frontend;
  out << kMagic << ' ' << kVersion << '\n';
  out << "feature_dim " << model.feature_dim << '\n';
  out << "sample_rate_hz " << model.sample_rate_hz << '\n';
  out << "frontend"
      << " frame_length_ms " << FormatReal(fe.frame_length_ms)
      << " frame_shift_ms " << FormatReal(fe.frame_shift_ms)
      << " pre_emphasis " << FormatReal(fe.pre_emphasis)
      << " num_mel_filters " << fe.num_mel_filters
      << " num_cepstra " << fe.num_cepstra
      << " fft_size " << fe.fft_size
      << " low_freq_hz " << FormatReal(fe.low_freq_hz)
      << " high_freq_hz " << FormatReal(fe.high_freq_hz)
      << " append_deltas " << (fe.append_deltas ? 1 : 0)
      << " cepstral_mean_norm " << (fe.cepstral_mean_norm ? 1 : 0) << '\n';
  out << "num_phones " << model.phones.size() << '\n';
  for (const auto& [name, hmm] : model.phones) {
    const int n = hmm.num_states();
    out << "PHONE " << name << " states " << n << '\n';
    out << "TRANSITIONS\n";
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) out << (j ? " " : "") << FormatReal(hmm.Transition(i, j));
      out << '\n';
    }
    for (int s = 0; s < n; ++s) {
      const auto& mix = hmm.states[s].mixture();
      out << "STATE " << s << " components " << mix.size() << '\n';
      for (std::size_t m = 0; m < mix.size(); ++m) {
        out << "COMPONENT " << m << " weight " << FormatReal(mix[m].weight) << '\n';
        out << "MEAN";
        for (double v : mix[m].mean) out << ' ' << FormatReal(v);
        out << "\nVARIANCE";
        for (double v : mix[m].variance) out << ' ' << FormatReal(v);
        out << '\n';
      }
    }
    out << "END_PHONE\n";
  }
  out << "END\n";
  return out.str();
}

AcousticModel ParseModel(std::string_view text) {
  TokenReader in(text);
  in.Expect(kMagic);
  in.Expect(kVersion);
  AcousticModel model;
  model.feature_dim = static_cast<int>(in.KeyedInteger("feature_dim"));
  if (model.feature_dim <= 0) Schema("feature_dim must be positive");
  model.sample_rate_hz = static_cast<int>(in.KeyedInteger("sample_rate_hz"));
  if (model.sample_rate_hz <= 0) Schema("sample_rate_hz must be positive");

  auto& fe = model.frontend;
  in.Expect("frontend");
  fe.frame_length_ms = in.KeyedReal("frame_length_ms");
  fe.frame_shift_ms = in.KeyedReal("frame_shift_ms");
  fe.pre_emphasis = in.KeyedReal("pre_emphasis");
  fe.num_mel_filters = static_cast<int>(in.KeyedInteger("num_mel_filters"));
  fe.num_cepstra = static_cast<int>(in.KeyedInteger("num_cepstra"));
  fe.fft_size = static_cast<int>(in.KeyedInteger("fft_size"));
  fe.low_freq_hz = in.KeyedReal("low_freq_hz");
  fe.high_freq_hz = in.KeyedReal("high_freq_hz");
  fe.append_deltas = in.KeyedInteger("append_deltas") != 0;
  fe.cepstral_mean_norm = in.KeyedInteger("cepstral_mean_norm") != 0;
  if (fe.FeatureDim() != model.feature_dim)
    Schema("feature_dim " + std::to_string(model.feature_dim) +
           " disagrees with front-end dimension " + std::to_string(fe.FeatureDim()));

  const long num_phones = in.KeyedInteger("num_phones");
  if (num_phones < 0) Schema("negative phone count");
  for (long p = 0; p < num_phones; ++p) {
    in.Expect("PHONE");
    PhoneHmm hmm;
    hmm.phone = std::string(in.Next());
    const long n = in.KeyedInteger("states");
    if (n <= 0 || n > 1000) Schema("phone " + hmm.phone + ": bad state count");
    in.Expect("TRANSITIONS");
    hmm.transitions.resize(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (auto& v : hmm.transitions) v = in.Real();
    for (long s = 0; s < n; ++s) {
      in.Expect("STATE");
      if (in.Integer() != s) Schema("phone " + hmm.phone + ": states out of order");
      const long m_count = in.KeyedInteger("components");
      if (m_count <= 0) Schema("phone " + hmm.phone + ": empty mixture");
      std::vector<GaussianComponent> mix(m_count);
      for (long m = 0; m < m_count; ++m) {
        in.Expect("COMPONENT");
        if (in.Integer() != m) Schema("phone " + hmm.phone + ": components out of order");
        mix[m].weight = in.KeyedReal("weight");
        in.Expect("MEAN");
        mix[m].mean.resize(model.feature_dim);
        for (auto& v : mix[m].mean) v = in.Real();
        in.Expect("VARIANCE");
        mix[m].variance.resize(model.feature_dim);
        for (auto& v : mix[m].variance) {
          v = in.Real();
          if (!(v > 0.0)) Schema("phone " + hmm.phone + ": non-positive variance");
        }
      }
      hmm.states.emplace_back(std::move(mix));
    }
    in.Expect("END_PHONE");
    const std::string name = hmm.phone;
    if (!model.phones.emplace(name, std::move(hmm)).second)
      Schema("phone " + name + " appears twice");
  }
  in.Expect("END");
  if (!in.AtEnd()) Schema("trailing data after END");
  return model;
}

void SaveModel(const AcousticModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << SerializeModel(model);
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

AcousticModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseModel(buf.str());
}

}  // namespace digitspeech
