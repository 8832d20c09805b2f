// src/frontend.cc

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

#include "digitspeech/frontend.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>

#include "digitspeech/errors.h"
#include "parallel_for.h"

namespace digitspeech {

namespace {

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

// fftw planning is not thread-safe; execution on a shared plan with fresh
// arrays is.
class RealFftPlans {
 public:
  static RealFftPlans& Instance() {
    static RealFftPlans plans;
    return plans;
  }

  fftw_plan Get(int n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(
        n, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(n, plan);
    return plan;
  }

  ~RealFftPlans() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mu_;
  std::map<int, fftw_plan> plans_;
};

}  // namespace

int FrontendConfig::FrameLengthSamples(int sample_rate_hz) const {
  return static_cast<int>(std::lround(frame_length_ms * sample_rate_hz / 1000.0));
}

int FrontendConfig::FrameShiftSamples(int sample_rate_hz) const {
  return static_cast<int>(std::lround(frame_shift_ms * sample_rate_hz / 1000.0));
}

double FrontendConfig::HighFreqHz(int sample_rate_hz) const {
  return high_freq_hz > 0.0 ? high_freq_hz : sample_rate_hz / 2.0;
}

int FrontendConfig::FeatureDim() const {
  return append_deltas ? 3 * num_cepstra : num_cepstra;
}

void FrontendConfig::Validate(int sample_rate_hz) const {
  if (sample_rate_hz <= 0) Invalid("sample rate must be positive");
  if (!(frame_length_ms > 0.0) || !(frame_shift_ms > 0.0))
    Invalid("frame length and shift must be positive");
  if (frame_shift_ms > frame_length_ms)
    Invalid("frame_shift_ms exceeds frame_length_ms");
  if (!(pre_emphasis >= 0.0 && pre_emphasis < 1.0))
    Invalid("pre_emphasis must lie in [0, 1)");
  if (num_mel_filters < 2) Invalid("num_mel_filters must be >= 2");
  if (num_cepstra < 1) Invalid("num_cepstra must be >= 1");
  if (num_cepstra > num_mel_filters)
    Invalid("num_cepstra exceeds num_mel_filters");
  if (!IsPowerOfTwo(fft_size)) Invalid("fft_size must be a power of two");
  const int frame_len = FrameLengthSamples(sample_rate_hz);
  if (frame_len < 2) Invalid("frame shorter than 2 samples");
  if (FrameShiftSamples(sample_rate_hz) < 1) Invalid("frame shift below one sample");
  if (fft_size < frame_len)
    Invalid("fft_size " + std::to_string(fft_size) + " shorter than frame (" +
            std::to_string(frame_len) + " samples)");
  const double high = HighFreqHz(sample_rate_hz);
  if (low_freq_hz < 0.0) Invalid("low_freq_hz must be >= 0");
  if (high > sample_rate_hz / 2.0) Invalid("high_freq_hz above Nyquist");
  if (!(low_freq_hz < high)) Invalid("low_freq_hz must be below high_freq_hz");
}

FeatureSequence::FeatureSequence(int dim, std::string source_id)
    : dim_(dim), source_id_(std::move(source_id)) {}

void FeatureSequence::AppendFrame(std::span<const double> values) {
  if (static_cast<int>(values.size()) != dim_)
    throw Error(ErrorCode::kDimensionMismatch,
                "frame of size " + std::to_string(values.size()) +
                    " appended to sequence of dim " + std::to_string(dim_));
  data_.insert(data_.end(), values.begin(), values.end());
}

std::vector<double> PreEmphasize(std::span<const double> samples, double coeff) {
  std::vector<double> out(samples.size());
  if (samples.empty()) return out;
  out[0] = samples[0];
  for (std::size_t n = 1; n < samples.size(); ++n)
    out[n] = samples[n] - coeff * samples[n - 1];
  return out;
}

int NumFrames(std::size_t num_samples, int frame_len, int shift) {
  if (num_samples < static_cast<std::size_t>(frame_len)) return 0;
  return static_cast<int>((num_samples - frame_len) / shift) + 1;
}

std::vector<std::vector<double>> FrameSignal(std::span<const double> samples,
                                             int frame_len, int shift) {
  const int count = NumFrames(samples.size(), frame_len, shift);
  std::vector<std::vector<double>> frames;
  frames.reserve(count);
  for (int k = 0; k < count; ++k) {
    auto begin = samples.begin() + static_cast<std::ptrdiff_t>(k) * shift;
    frames.emplace_back(begin, begin + frame_len);
  }
  return frames;
}

std::vector<double> HammingWeights(int length) {
  std::vector<double> w(length);
  const double denom = static_cast<double>(length - 1);
  for (int n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / denom);
  return w;
}

std::vector<double> HammingWindow(std::span<const double> frame) {
  const auto w = HammingWeights(static_cast<int>(frame.size()));
  std::vector<double> out(frame.size());
  for (std::size_t n = 0; n < frame.size(); ++n) out[n] = frame[n] * w[n];
  return out;
}

std::vector<double> PowerSpectrum(std::span<const double> frame, int fft_size) {
  if (static_cast<int>(frame.size()) > fft_size)
    throw Error(ErrorCode::kInvalidConfig, "frame longer than fft_size");
  std::vector<double> in(fft_size, 0.0);
  std::copy(frame.begin(), frame.end(), in.begin());
  std::vector<std::complex<double>> out(fft_size / 2 + 1);
  fftw_execute_dft_r2c(RealFftPlans::Instance().Get(fft_size), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  std::vector<double> power(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) power[k] = std::norm(out[k]);
  return power;
}

double MelOfHz(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double HzOfMel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix MelFilterbank(const FrontendConfig& config, int sample_rate_hz) {
  config.Validate(sample_rate_hz);
  const int num_filters = config.num_mel_filters;
  const int num_bins = config.fft_size / 2 + 1;
  const double mel_low = MelOfHz(config.low_freq_hz);
  const double mel_high = MelOfHz(config.HighFreqHz(sample_rate_hz));
  const double bin_hz = static_cast<double>(sample_rate_hz) / config.fft_size;

  // num_filters + 2 edge points; filter m spans points m..m+2.
  std::vector<double> edge_hz(num_filters + 2);
  std::vector<long> edge_bin(num_filters + 2);
  for (int i = 0; i < num_filters + 2; ++i) {
    const double mel = mel_low + i * (mel_high - mel_low) / (num_filters + 1);
    edge_hz[i] = HzOfMel(mel);
    edge_bin[i] = std::lround(edge_hz[i] / bin_hz);
  }
  for (int i = 0; i + 1 < num_filters + 2; ++i) {
    if (edge_bin[i] == edge_bin[i + 1])
      throw Error(ErrorCode::kDegenerateFilter,
                  "mel points " + std::to_string(i) + " and " + std::to_string(i + 1) +
                      " share FFT bin " + std::to_string(edge_bin[i]) +
                      "; increase fft_size or reduce num_mel_filters");
  }

  Matrix bank(num_filters, num_bins);
  for (int m = 0; m < num_filters; ++m) {
    const double left = edge_hz[m], center = edge_hz[m + 1], right = edge_hz[m + 2];
    double row_sum = 0.0;
    for (int k = 0; k < num_bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > left && f < center) {
        w = (f - left) / (center - left);
      } else if (f >= center && f < right) {
        w = (right - f) / (right - center);
      }
      bank(m, k) = w;
      row_sum += w;
    }
    if (!(row_sum > 0.0))
      throw Error(ErrorCode::kDegenerateFilter,
                  "filter " + std::to_string(m) + " covers no FFT bin");
  }
  return bank;
}

Matrix DctMatrix(int num_out, int num_in) {
  Matrix dct(num_out, num_in);
  for (int k = 0; k < num_out; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / num_in);
    for (int n = 0; n < num_in; ++n)
      dct(k, n) = scale * std::cos(std::numbers::pi * k * (n + 0.5) / num_in);
  }
  return dct;
}

std::vector<double> RegressionDeltas(std::span<const double> values,
                                     int num_frames, int dim) {
  constexpr int kWindow = 2;
  constexpr double kNorm = 2.0 * (1 * 1 + 2 * 2);
  std::vector<double> out(static_cast<std::size_t>(num_frames) * dim, 0.0);
  auto at = [&](int t, int d) {
    t = std::clamp(t, 0, num_frames - 1);
    return values[static_cast<std::size_t>(t) * dim + d];
  };
  for (int t = 0; t < num_frames; ++t) {
    for (int d = 0; d < dim; ++d) {
      double acc = 0.0;
      for (int n = 1; n <= kWindow; ++n) acc += n * (at(t + n, d) - at(t - n, d));
      out[static_cast<std::size_t>(t) * dim + d] = acc / kNorm;
    }
  }
  return out;
}

MfccExtractor::MfccExtractor(const FrontendConfig& config, int sample_rate_hz)
    : config_(config),
      sample_rate_hz_(sample_rate_hz),
      frame_len_(config.FrameLengthSamples(sample_rate_hz)),
      frame_shift_(config.FrameShiftSamples(sample_rate_hz)),
      filterbank_(MelFilterbank(config, sample_rate_hz)),
      dct_(DctMatrix(config.num_cepstra, config.num_mel_filters)) {
  window_ = HammingWeights(frame_len_);
}

std::vector<double> MfccExtractor::Cepstra(std::span<const double> frame) const {
  std::vector<double> windowed(frame.size());
  for (std::size_t n = 0; n < frame.size(); ++n) windowed[n] = frame[n] * window_[n];
  const auto power = PowerSpectrum(windowed, config_.fft_size);

  std::vector<double> log_energy(filterbank_.rows);
  for (int m = 0; m < filterbank_.rows; ++m) {
    const auto row = filterbank_.Row(m);
    double e = 0.0;
    for (int k = 0; k < filterbank_.cols; ++k) e += row[k] * power[k];
    log_energy[m] = std::log(std::max(e, kLogFloor));
  }

  std::vector<double> cepstra(dct_.rows);
  for (int c = 0; c < dct_.rows; ++c) {
    const auto row = dct_.Row(c);
    double acc = 0.0;
    for (int m = 0; m < dct_.cols; ++m) acc += row[m] * log_energy[m];
    cepstra[c] = acc;
  }
  return cepstra;
}

FeatureSequence MfccExtractor::Compute(const AudioSignal& signal) const {
  if (signal.sample_rate_hz != sample_rate_hz_)
    throw SampleRateMismatch(signal.sample_rate_hz, sample_rate_hz_);
  const int num_frames = NumFrames(signal.samples.size(), frame_len_, frame_shift_);
  const int min_frames = config_.append_deltas ? 3 : 1;
  if (num_frames < min_frames)
    throw Error(ErrorCode::kTooShort,
                signal.source_id + ": " + std::to_string(num_frames) +
                    " frames, need at least " + std::to_string(min_frames));

  const auto emphasized = PreEmphasize(signal.samples, config_.pre_emphasis);
  const int nc = config_.num_cepstra;
  std::vector<double> cepstra(static_cast<std::size_t>(num_frames) * nc);
  for (int t = 0; t < num_frames; ++t) {
    const std::span<const double> frame(
        emphasized.data() + static_cast<std::size_t>(t) * frame_shift_,
        static_cast<std::size_t>(frame_len_));
    const auto c = Cepstra(frame);
    std::copy(c.begin(), c.end(), cepstra.begin() + static_cast<std::ptrdiff_t>(t) * nc);
  }

  if (config_.cepstral_mean_norm) {
    for (int d = 0; d < nc; ++d) {
      double mean = 0.0;
      for (int t = 0; t < num_frames; ++t) mean += cepstra[static_cast<std::size_t>(t) * nc + d];
      mean /= num_frames;
      for (int t = 0; t < num_frames; ++t) cepstra[static_cast<std::size_t>(t) * nc + d] -= mean;
    }
  }

  FeatureSequence features(config_.FeatureDim(), signal.source_id);
  if (!config_.append_deltas) {
    for (int t = 0; t < num_frames; ++t)
      features.AppendFrame(std::span<const double>(cepstra).subspan(
          static_cast<std::size_t>(t) * nc, nc));
    return features;
  }

  const auto delta = RegressionDeltas(cepstra, num_frames, nc);
  const auto delta2 = RegressionDeltas(delta, num_frames, nc);
  std::vector<double> row(3 * nc);
  for (int t = 0; t < num_frames; ++t) {
    const std::size_t off = static_cast<std::size_t>(t) * nc;
    for (int d = 0; d < nc; ++d) {
      row[d] = cepstra[off + d];
      row[nc + d] = delta[off + d];
      row[2 * nc + d] = delta2[off + d];
    }
    features.AppendFrame(row);
  }
  return features;
}

FeatureSequence Mfcc(const AudioSignal& signal, const FrontendConfig& config) {
  return MfccExtractor(config, signal.sample_rate_hz).Compute(signal);
}

std::vector<FeatureSequence> MfccBatch(std::span<const AudioSignal> signals,
                                       const FrontendConfig& config,
                                       Execution execution) {
  std::vector<FeatureSequence> out(signals.size());
  if (signals.empty()) return out;
  const MfccExtractor extractor(config, signals.front().sample_rate_hz);
  ParallelFor(signals.size(), execution,
              [&](std::size_t i) { out[i] = extractor.Compute(signals[i]); });
  return out;
}

}  // namespace digitspeech
