// include/digitspeech/frontend.h

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

#ifndef DIGITSPEECH_FRONTEND_H_
#define DIGITSPEECH_FRONTEND_H_

#include <span>
#include <string>
#include <vector>

#include "digitspeech/audio_io.h"
#include "digitspeech/execution.h"

namespace digitspeech {

struct FrontendConfig {
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  double pre_emphasis = 0.97;
  int num_mel_filters = 26;
  int num_cepstra = 13;
  int fft_size = 512;
  double low_freq_hz = 0.0;
  // <= 0 means Nyquist.
  double high_freq_hz = 0.0;
  bool append_deltas = true;
  // Per-utterance cepstral mean subtraction. Off by default.
  bool cepstral_mean_norm = false;

  int FrameLengthSamples(int sample_rate_hz) const;
  int FrameShiftSamples(int sample_rate_hz) const;
  double HighFreqHz(int sample_rate_hz) const;
  // 3 * num_cepstra with deltas, num_cepstra otherwise.
  int FeatureDim() const;

  // Throws Error(kInvalidConfig) when an invariant does not hold.
  void Validate(int sample_rate_hz) const;

  bool operator==(const FrontendConfig&) const = default;
};

// Time-ordered feature vectors of one utterance, stored row-major.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  FeatureSequence(int dim, std::string source_id);

  int dim() const { return dim_; }
  int num_frames() const { return dim_ == 0 ? 0 : static_cast<int>(data_.size()) / dim_; }
  const std::string& source_id() const { return source_id_; }

  std::span<const double> Frame(int t) const {
    return {data_.data() + static_cast<std::size_t>(t) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<double> MutableFrame(int t) {
    return {data_.data() + static_cast<std::size_t>(t) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  void AppendFrame(std::span<const double> values);
  const std::vector<double>& data() const { return data_; }

  bool operator==(const FeatureSequence&) const = default;

 private:
  int dim_ = 0;
  std::string source_id_;
  std::vector<double> data_;
};

// y[0] = x[0], y[n] = x[n] - coeff * x[n-1].
std::vector<double> PreEmphasize(std::span<const double> samples, double coeff);

// Frames of frame_len samples every shift samples. A final partial frame is
// dropped.
std::vector<std::vector<double>> FrameSignal(std::span<const double> samples,
                                             int frame_len, int shift);
int NumFrames(std::size_t num_samples, int frame_len, int shift);

std::vector<double> HammingWeights(int length);
std::vector<double> HammingWindow(std::span<const double> frame);

// |DFT_k|^2 for k = 0..fft_size/2 of the zero-padded frame.
std::vector<double> PowerSpectrum(std::span<const double> frame, int fft_size);

double MelOfHz(double hz);
double HzOfMel(double mel);

// Dense row-major matrix; small helper used for the filterbank and DCT.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
  std::span<const double> Row(int r) const {
    return {values.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
};

// Triangular filters over fft_size/2+1 bins with centers equally spaced in
// mel between low_freq_hz and the high cutoff. Throws DegenerateFilter when
// two adjacent filter edge points land on the same FFT bin.
Matrix MelFilterbank(const FrontendConfig& config, int sample_rate_hz);

// Orthonormal DCT-II basis, num_out x num_in.
Matrix DctMatrix(int num_out, int num_in);

// First- and second-order regression deltas (window 2, edge replication).
// Input is num_frames x dim row-major; returns the same layout.
std::vector<double> RegressionDeltas(std::span<const double> values,
                                     int num_frames, int dim);

// Filterbank energies below this are clamped before the log.
inline constexpr double kLogFloor = 1e-10;

// Reusable MFCC extractor; holds the filterbank, window and DCT for one
// sample rate. Immutable after construction and safe to share.
class MfccExtractor {
 public:
  MfccExtractor(const FrontendConfig& config, int sample_rate_hz);

  const FrontendConfig& config() const { return config_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  const Matrix& filterbank() const { return filterbank_; }

  // Static cepstra (num_cepstra values) of one already pre-emphasized frame.
  std::vector<double> Cepstra(std::span<const double> frame) const;

  // Throws TooShort when the signal has no frame, or fewer than 3 frames
  // while deltas are enabled.
  FeatureSequence Compute(const AudioSignal& signal) const;

 private:
  FrontendConfig config_;
  int sample_rate_hz_;
  int frame_len_;
  int frame_shift_;
  std::vector<double> window_;
  Matrix filterbank_;
  Matrix dct_;
};

FeatureSequence Mfcc(const AudioSignal& signal, const FrontendConfig& config);

// Batch extraction over utterances. All signals must share one sample rate.
std::vector<FeatureSequence> MfccBatch(std::span<const AudioSignal> signals,
                                       const FrontendConfig& config,
                                       Execution execution);

}  // namespace digitspeech

#endif  // DIGITSPEECH_FRONTEND_H_
