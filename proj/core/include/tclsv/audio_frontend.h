// tclsv/audio_frontend.h

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

#ifndef TCLSV_AUDIO_FRONTEND_H_
#define TCLSV_AUDIO_FRONTEND_H_

// MFCC frontend: framing, Mel filterbank, RASTA, DCT, deltas, energy VAD
// and utterance-level CMVN. Everything here is a pure function of its
// inputs.

#include <string>
#include <vector>

#include "tclsv/types.h"

namespace tclsv {

struct AudioSignal {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate_hz = 16000;
};

struct FrontendConfig {
  double frame_shift_ms = 10.0;
  double frame_length_ms = 20.0;
  int num_static_ceps = 19;  // C1..C19, C0 dropped
  int num_mel_filters = 24;
  double preemphasis_coeff = 0.97;
  bool rasta_enabled = true;
  double vad_threshold_db = 30.0;  // below the utterance maximum
  int delta_window = 2;            // frames each side

  /// Throws Error(kInvalidArgument) when the invariants do not hold.
  void Validate() const;
};

/// Frame-level features of one utterance. `frame_energies` holds the
/// per-frame log energy in dB and always has one entry per row of `frames`.
struct FeatureMatrix {
  Matrix frames;
  std::string utterance_id;
  std::vector<double> frame_energies;

  Eigen::Index NumFrames() const { return frames.rows(); }
  Eigen::Index Dim() const { return frames.cols(); }
};

/// Output of FrameSignal: windowed frames (one per row) plus the log
/// energy of each frame measured on the raw samples before pre-emphasis
/// and windowing.
struct FramedSignal {
  Matrix frames;
  std::vector<double> log_energies_db;
  int sample_rate_hz = 16000;
};

/// Floor applied to power-like quantities before taking logs.
inline constexpr double kLogFloorInput = 1e-10;

int FrameLengthSamples(const FrontendConfig &config, int sample_rate_hz);
int FrameShiftSamples(const FrontendConfig &config, int sample_rate_hz);
/// 1 + floor((len - frame_len) / shift), or 0 when the signal is too short.
int NumFrames(int num_samples, int frame_length, int frame_shift);

/// Pre-emphasizes the whole signal, cuts it into overlapping frames and
/// applies a Hamming window. Throws SignalTooShort if the signal holds
/// fewer samples than one frame.
FramedSignal FrameSignal(const AudioSignal &signal, const FrontendConfig &config);

/// Triangular HTK-Mel filter weights, one row per filter, one column per
/// FFT bin in [0, fft_size/2].
Matrix MelFilterbank(int num_filters, int fft_size, int sample_rate_hz);

/// Smallest power of two that holds one frame.
int FftSize(int frame_length);

/// log(max(mel energy, 1e-10)) per frame and filter, using the magnitude
/// spectrum.
Matrix ComputeLogFilterbank(const FramedSignal &framed,
                            const FrontendConfig &config);

/// Orthonormal DCT-II of each row, keeping coefficients 1..num_ceps.
Matrix DctCepstra(const Matrix &log_filterbank, int num_ceps);

/// Static cepstra C1..C19 without RASTA. Carries the frame energies.
FeatureMatrix ComputeMfcc(const FramedSignal &framed, const FrontendConfig &config);

/// RASTA band-pass along time for every column, zero initial state:
///   H(z) = 0.1 (2 + z^-1 - z^-3 - 2 z^-4) / (1 - 0.98 z^-1)
Matrix ApplyRasta(const Matrix &trajectories);

/// Regression deltas with edge replication:
///   d_t = sum_{n=1..W} n (c_{t+n} - c_{t-n}) / (2 sum_{n=1..W} n^2)
Matrix ComputeDeltas(const Matrix &features, int window);

/// [static, delta, delta-delta]; D becomes 3x the static dimension.
FeatureMatrix AppendDeltas(const FeatureMatrix &static_features, int window);

/// Keeps the frames whose energy exceeds (max energy - threshold), in order.
/// Throws AllFramesRemoved if nothing survives.
FeatureMatrix ApplyVad(const FeatureMatrix &features, const FrontendConfig &config);

/// Per-column zero mean / unit variance (population convention). Columns
/// with variance below 1e-8 are centered only.
Matrix Cmvn(const Matrix &features);
FeatureMatrix Cmvn(const FeatureMatrix &features);

/// Full chain: frame, log filterbank, optional RASTA, DCT, deltas, VAD, CMVN.
FeatureMatrix ExtractMfccFeatures(const AudioSignal &signal,
                                  const FrontendConfig &config,
                                  const std::string &utterance_id);

}  // namespace tclsv

#endif  // TCLSV_AUDIO_FRONTEND_H_
