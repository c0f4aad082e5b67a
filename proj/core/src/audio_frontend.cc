// src/audio_frontend.cc

// Copyright 2026 The tclsv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tclsv/audio_frontend.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "tclsv/error.h"

namespace tclsv {

namespace {

constexpr double kVarianceFloor = 1e-8;

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

double EnergyDb(double energy) {
  return 10.0 * std::log10(std::max(energy, kLogFloorInput));
}

}  // namespace

void FrontendConfig::Validate() const {
  auto fail = [](const std::string &what) {
    throw Error(ErrorCode::kInvalidArgument, "frontend config: " + what);
  };
  if (!(frame_shift_ms > 0.0)) fail("frame_shift_ms must be positive");
  if (frame_length_ms < frame_shift_ms) fail("frame_length_ms < frame_shift_ms");
  if (num_static_ceps < 1) fail("num_static_ceps must be positive");
  if (num_mel_filters <= num_static_ceps)
    fail("num_static_ceps must be smaller than num_mel_filters");
  if (!(preemphasis_coeff >= 0.0 && preemphasis_coeff < 1.0))
    fail("preemphasis_coeff must lie in [0, 1)");
  if (delta_window < 1) fail("delta_window must be positive");
  if (!std::isfinite(vad_threshold_db)) fail("vad_threshold_db must be finite");
}

int FrameLengthSamples(const FrontendConfig &config, int sample_rate_hz) {
  return static_cast<int>(std::lround(config.frame_length_ms * sample_rate_hz / 1000.0));
}

int FrameShiftSamples(const FrontendConfig &config, int sample_rate_hz) {
  return static_cast<int>(std::lround(config.frame_shift_ms * sample_rate_hz / 1000.0));
}

int NumFrames(int num_samples, int frame_length, int frame_shift) {
  if (num_samples < frame_length) return 0;
  return 1 + (num_samples - frame_length) / frame_shift;
}

int FftSize(int frame_length) {
  int n = 1;
  while (n < frame_length) n <<= 1;
  return n;
}

FramedSignal FrameSignal(const AudioSignal &signal, const FrontendConfig &config) {
  config.Validate();
  if (signal.sample_rate_hz <= 0)
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  const int len = FrameLengthSamples(config, signal.sample_rate_hz);
  const int shift = FrameShiftSamples(config, signal.sample_rate_hz);
  if (len < 1 || shift < 1)
    throw Error(ErrorCode::kInvalidArgument, "frame length/shift rounds to zero samples");
  const int num_samples = static_cast<int>(signal.samples.size());
  const int num_frames = NumFrames(num_samples, len, shift);
  if (num_frames == 0)
    throw Error(ErrorCode::kSignalTooShort,
                std::to_string(num_samples) + " samples, one frame needs " +
                    std::to_string(len));

  const double a = config.preemphasis_coeff;
  std::vector<double> emphasized(signal.samples.size());
  emphasized[0] = signal.samples[0];
  for (size_t n = 1; n < signal.samples.size(); ++n)
    emphasized[n] = signal.samples[n] - a * signal.samples[n - 1];

  Vector window(len);
  for (int i = 0; i < len; ++i)
    window[i] = len == 1 ? 1.0 : 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (len - 1));

  FramedSignal out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.frames.resize(num_frames, len);
  out.log_energies_db.resize(num_frames);
  for (int t = 0; t < num_frames; ++t) {
    const size_t start = static_cast<size_t>(t) * shift;
    double energy = 0.0;
    for (int i = 0; i < len; ++i) {
      const double raw = signal.samples[start + i];
      energy += raw * raw;
      out.frames(t, i) = emphasized[start + i] * window[i];
    }
    out.log_energies_db[t] = EnergyDb(energy);
  }
  return out;
}

Matrix MelFilterbank(int num_filters, int fft_size, int sample_rate_hz) {
  const int num_bins = fft_size / 2 + 1;
  const double nyquist = sample_rate_hz / 2.0;
  const double mel_hi = HzToMel(nyquist);
  std::vector<double> edges(num_filters + 2);
  for (int m = 0; m < num_filters + 2; ++m)
    edges[m] = MelToHz(mel_hi * m / (num_filters + 1));

  Matrix bank = Matrix::Zero(num_filters, num_bins);
  for (int m = 0; m < num_filters; ++m) {
    const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < num_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate_hz / fft_size;
      if (f > lo && f < hi)
        bank(m, k) = f <= center ? (f - lo) / (center - lo) : (hi - f) / (hi - center);
    }
  }
  return bank;
}

Matrix ComputeLogFilterbank(const FramedSignal &framed, const FrontendConfig &config) {
  const Eigen::Index num_frames = framed.frames.rows();
  const int len = static_cast<int>(framed.frames.cols());
  const int fft_size = FftSize(len);
  const int num_bins = fft_size / 2 + 1;
  const Matrix bank = MelFilterbank(config.num_mel_filters, fft_size, framed.sample_rate_hz);

  Eigen::FFT<double> fft;
  std::vector<double> buffer(fft_size, 0.0);
  std::vector<std::complex<double>> spectrum;
  Vector magnitude(num_bins);
  Matrix out(num_frames, config.num_mel_filters);
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    std::fill(buffer.begin(), buffer.end(), 0.0);
    for (int i = 0; i < len; ++i) buffer[i] = framed.frames(t, i);
    fft.fwd(spectrum, buffer);
    for (int k = 0; k < num_bins; ++k) magnitude[k] = std::abs(spectrum[k]);
    const Vector mel = bank * magnitude;
    for (int m = 0; m < config.num_mel_filters; ++m)
      out(t, m) = std::log(std::max(mel[m], kLogFloorInput));
  }
  return out;
}

Matrix DctCepstra(const Matrix &log_filterbank, int num_ceps) {
  const Eigen::Index num_filters = log_filterbank.cols();
  if (num_ceps >= num_filters)
    throw Error(ErrorCode::kDimensionMismatch, "more cepstra than filterbank channels");
  Matrix basis(num_filters, num_ceps);
  const double scale = std::sqrt(2.0 / static_cast<double>(num_filters));
  for (Eigen::Index m = 0; m < num_filters; ++m)
    for (int k = 1; k <= num_ceps; ++k)
      basis(m, k - 1) = scale * std::cos(M_PI * k * (m + 0.5) / num_filters);
  return log_filterbank * basis;
}

FeatureMatrix ComputeMfcc(const FramedSignal &framed, const FrontendConfig &config) {
  config.Validate();
  FeatureMatrix out;
  out.frames = DctCepstra(ComputeLogFilterbank(framed, config), config.num_static_ceps);
  out.frame_energies = framed.log_energies_db;
  return out;
}

Matrix ApplyRasta(const Matrix &trajectories) {
  static constexpr double kNum[5] = {0.2, 0.1, 0.0, -0.1, -0.2};
  static constexpr double kPole = 0.98;
  const Eigen::Index num_frames = trajectories.rows();
  Matrix out(num_frames, trajectories.cols());
  for (Eigen::Index d = 0; d < trajectories.cols(); ++d) {
    double prev = 0.0;
    for (Eigen::Index t = 0; t < num_frames; ++t) {
      double y = kPole * prev;
      for (Eigen::Index j = 0; j < 5 && j <= t; ++j) y += kNum[j] * trajectories(t - j, d);
      out(t, d) = y;
      prev = y;
    }
  }
  return out;
}

Matrix ComputeDeltas(const Matrix &features, int window) {
  const Eigen::Index num_frames = features.rows();
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += n * n;
  denom *= 2.0;
  Matrix out = Matrix::Zero(num_frames, features.cols());
  auto clamp = [&](Eigen::Index t) {
    return std::clamp<Eigen::Index>(t, 0, num_frames - 1);
  };
  for (Eigen::Index t = 0; t < num_frames; ++t) {
    for (int n = 1; n <= window; ++n)
      out.row(t) += n * (features.row(clamp(t + n)) - features.row(clamp(t - n)));
    out.row(t) /= denom;
  }
  return out;
}

FeatureMatrix AppendDeltas(const FeatureMatrix &static_features, int window) {
  if (window < 1) throw Error(ErrorCode::kInvalidArgument, "delta window must be positive");
  const Matrix &s = static_features.frames;
  const Matrix delta = ComputeDeltas(s, window);
  const Matrix delta2 = ComputeDeltas(delta, window);
  FeatureMatrix out;
  out.utterance_id = static_features.utterance_id;
  out.frame_energies = static_features.frame_energies;
  out.frames.resize(s.rows(), 3 * s.cols());
  out.frames << s, delta, delta2;
  return out;
}

FeatureMatrix ApplyVad(const FeatureMatrix &features, const FrontendConfig &config) {
  const auto &energies = features.frame_energies;
  if (static_cast<Eigen::Index>(energies.size()) != features.NumFrames())
    throw Error(ErrorCode::kDimensionMismatch, "frame energies do not match frame count");
  if (energies.empty())
    throw Error(ErrorCode::kAllFramesRemoved, "utterance has no frames");
  const double cutoff =
      *std::max_element(energies.begin(), energies.end()) - config.vad_threshold_db;
  std::vector<Eigen::Index> keep;
  for (size_t t = 0; t < energies.size(); ++t)
    if (energies[t] > cutoff) keep.push_back(static_cast<Eigen::Index>(t));
  if (keep.empty())
    throw Error(ErrorCode::kAllFramesRemoved,
                features.utterance_id.empty() ? "no frame above threshold"
                                              : features.utterance_id);

  FeatureMatrix out;
  out.utterance_id = features.utterance_id;
  out.frames.resize(static_cast<Eigen::Index>(keep.size()), features.Dim());
  out.frame_energies.reserve(keep.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    out.frames.row(static_cast<Eigen::Index>(i)) = features.frames.row(keep[i]);
    out.frame_energies.push_back(energies[keep[i]]);
  }
  return out;
}

Matrix Cmvn(const Matrix &features) {
  const Eigen::Index num_frames = features.rows();
  if (num_frames == 0) return features;
  const RowVector mean = features.colwise().mean();
  Matrix out = features.rowwise() - mean;
  const RowVector var = out.array().square().colwise().sum() / static_cast<double>(num_frames);
  for (Eigen::Index d = 0; d < out.cols(); ++d)
    if (var[d] >= kVarianceFloor) out.col(d) /= std::sqrt(var[d]);
  return out;
}

FeatureMatrix Cmvn(const FeatureMatrix &features) {
  FeatureMatrix out = features;
  out.frames = Cmvn(features.frames);
  return out;
}

FeatureMatrix ExtractMfccFeatures(const AudioSignal &signal,
                                  const FrontendConfig &config,
                                  const std::string &utterance_id) {
  const FramedSignal framed = FrameSignal(signal, config);
  Matrix log_fbank = ComputeLogFilterbank(framed, config);
  if (config.rasta_enabled) log_fbank = ApplyRasta(log_fbank);

  FeatureMatrix statics;
  statics.utterance_id = utterance_id;
  statics.frames = DctCepstra(log_fbank, config.num_static_ceps);
  statics.frame_energies = framed.log_energies_db;
  return Cmvn(ApplyVad(AppendDeltas(statics, config.delta_window), config));
}

}  // namespace tclsv
