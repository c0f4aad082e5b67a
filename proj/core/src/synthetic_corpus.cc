// src/synthetic_corpus.cc

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

#include "tclsv/synthetic_corpus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "tclsv/binary_io.h"
#include "tclsv/error.h"
#include "tclsv/random.h"
#include "tclsv/wav_io.h"

namespace tclsv {

namespace {

constexpr int kNumResonators = 3;

struct SpeakerVoice {
  double f0_hz;
  std::array<double, kNumResonators> formants_hz;
  std::array<double, kNumResonators> bandwidths_hz;
  double breathiness;
};

struct Syllable {
  double duration_s;
  double peak;
  double attack;  // fraction of the syllable spent rising
  std::array<double, kNumResonators> formant_scale;
  bool voiced;
};

uint64_t Mix(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  for (uint64_t v : {a, b, c}) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 31;
  }
  return h;
}

SpeakerVoice MakeVoice(uint64_t seed, int speaker) {
  Rng rng(Mix(seed, 1, static_cast<uint64_t>(speaker)));
  SpeakerVoice v;
  v.f0_hz = rng.Uniform(90.0, 240.0);
  const double tract = rng.Uniform(0.8, 1.25);
  v.formants_hz = {rng.Uniform(450.0, 800.0) * tract, rng.Uniform(1100.0, 2000.0) * tract,
                   rng.Uniform(2400.0, 3400.0) * tract};
  v.bandwidths_hz = {rng.Uniform(60.0, 140.0), rng.Uniform(80.0, 180.0), rng.Uniform(120.0, 260.0)};
  v.breathiness = rng.Uniform(0.05, 0.35);
  return v;
}

std::vector<Syllable> MakePhrase(uint64_t seed, int phrase) {
  Rng rng(Mix(seed, 2, static_cast<uint64_t>(phrase)));
  const int count = 5 + static_cast<int>(rng.UniformInt(4));
  std::vector<Syllable> out;
  for (int i = 0; i < count; ++i) {
    Syllable s;
    s.duration_s = rng.Uniform(0.10, 0.26);
    s.peak = rng.Uniform(0.35, 1.0);
    s.attack = rng.Uniform(0.15, 0.6);
    for (auto &f : s.formant_scale) f = rng.Uniform(0.7, 1.35);
    s.voiced = rng.Uniform() > 0.2;
    out.push_back(s);
  }
  return out;
}

// Two-pole resonator with unit-ish peak gain.
class Resonator {
 public:
  void Set(double freq_hz, double bandwidth_hz, int rate) {
    const double r = std::exp(-M_PI * bandwidth_hz / rate);
    a1_ = 2.0 * r * std::cos(2.0 * M_PI * freq_hz / rate);
    a2_ = -r * r;
    gain_ = 1.0 - r;
  }
  double Step(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0, a2_ = 0, gain_ = 1, y1_ = 0, y2_ = 0;
};

}  // namespace

AudioSignal SynthesizeUtterance(const SyntheticCorpusOptions &options, int speaker, int phrase,
                                int repetition) {
  const int rate = options.sample_rate_hz;
  const SpeakerVoice voice = MakeVoice(options.seed, speaker);
  const std::vector<Syllable> syllables = MakePhrase(options.seed, phrase);
  Rng rng(Mix(options.seed, 3, static_cast<uint64_t>(speaker) * 1000 + static_cast<uint64_t>(phrase),
              static_cast<uint64_t>(repetition)));

  const double tempo = rng.Uniform(0.9, 1.1);
  const double pitch = voice.f0_hz * rng.Uniform(0.96, 1.04);
  const double level = rng.Uniform(0.6, 1.0);
  const double lead_s = rng.Uniform(0.10, 0.20);
  const double tail_s = rng.Uniform(0.10, 0.20);

  AudioSignal signal;
  signal.sample_rate_hz = rate;
  auto noise_floor = [&] { return 0.0005 * rng.Gaussian(); };
  for (int n = 0; n < static_cast<int>(lead_s * rate); ++n) signal.samples.push_back(noise_floor());

  std::array<Resonator, kNumResonators> tract;
  double phase = 0.0;
  for (const Syllable &syl : syllables) {
    const int len = static_cast<int>(syl.duration_s * tempo * rate);
    for (int k = 0; k < kNumResonators; ++k)
      tract[k].Set(std::min(voice.formants_hz[k] * syl.formant_scale[k], 0.45 * rate),
                   voice.bandwidths_hz[k], rate);
    const double amp = syl.peak * level * rng.Uniform(0.85, 1.15);
    for (int n = 0; n < len; ++n) {
      const double pos = static_cast<double>(n) / len;
      const double env = pos < syl.attack ? pos / syl.attack
                                          : 0.5 * (1.0 + std::cos(M_PI * (pos - syl.attack) / (1.0 - syl.attack)));
      double excitation = voice.breathiness * rng.Gaussian();
      if (syl.voiced) {
        const double f0 = pitch * (1.0 + 0.03 * std::sin(2.0 * M_PI * 5.0 * n / rate));
        phase += f0 / rate;
        if (phase >= 1.0) {
          phase -= 1.0;
          excitation += 8.0;
        }
      } else {
        excitation += 1.5 * rng.Gaussian();
      }
      double y = excitation;
      for (auto &r : tract) y = r.Step(y);
      signal.samples.push_back(amp * env * y + noise_floor());
    }
  }
  for (int n = 0; n < static_cast<int>(tail_s * rate); ++n) signal.samples.push_back(noise_floor());

  double peak = 0.0;
  for (double x : signal.samples) peak = std::max(peak, std::abs(x));
  if (peak > 0.0)
    for (double &x : signal.samples) x *= 0.5 / peak;
  return signal;
}

void WriteTrialList(const std::filesystem::path &path, const std::vector<Trial> &trials) {
  std::ostringstream os;
  for (const auto &t : trials)
    os << t.model_id << '\t' << t.test_utterance_id << '\t' << TrialTypeName(t.ground_truth) << '\n';
  WriteFileAtomic(path, os.str());
}

SyntheticCorpus WriteSyntheticCorpus(const std::filesystem::path &dir,
                                     const SyntheticCorpusOptions &options) {
  if (options.num_speakers < 2 || options.num_phrases < 1 || options.repetitions < 2)
    throw Error(ErrorCode::kInvalidArgument, "synthetic corpus: too few speakers/phrases/repetitions");
  auto is_dnn = [&](int p) {
    return std::find(options.dnn_phrases.begin(), options.dnn_phrases.end(), p) !=
           options.dnn_phrases.end();
  };
  auto spk = [](int s) { return "spk" + std::to_string(s); };
  auto phr = [](int p) { return "phr" + std::to_string(p); };

  SyntheticCorpus corpus;
  std::vector<ManifestEntry> tests;
  std::vector<std::pair<std::string, ManifestEntry>> models;
  const int half = options.repetitions / 2;
  for (int s = 0; s < options.num_speakers; ++s) {
    for (int p = 0; p < options.num_phrases; ++p) {
      for (int r = 0; r < options.repetitions; ++r) {
        ManifestEntry e;
        e.utterance_id = spk(s) + "_" + phr(p) + "_r" + std::to_string(r);
        e.wav_path = dir / "wav" / (e.utterance_id + ".wav");
        e.speaker_id = spk(s);
        e.phrase_id = phr(p);
        if (is_dnn(p)) e.split = r < half ? Split::kDnnTrain : Split::kUbmTrain;
        else e.split = r < half ? Split::kEnroll : Split::kTest;
        WriteWav(e.wav_path, SynthesizeUtterance(options, s, p, r));
        if (e.split == Split::kTest) tests.push_back(e);
        if (e.split == Split::kEnroll && r == 0) models.emplace_back(e.speaker_id + "_" + e.phrase_id, e);
        corpus.manifest.entries.push_back(std::move(e));
      }
    }
  }
  for (const auto &[model_id, m] : models) {
    for (const auto &t : tests) {
      const bool same_spk = t.speaker_id == m.speaker_id;
      const bool same_phr = t.phrase_id == m.phrase_id;
      const TrialType type = same_spk ? (same_phr ? TrialType::kTarget : TrialType::kTargetWrong)
                                      : (same_phr ? TrialType::kImpostorCorrect : TrialType::kImpostorWrong);
      corpus.trials.push_back({model_id, t.utterance_id, type});
    }
  }
  WriteManifest(dir / "manifest.tsv", corpus.manifest);
  WriteTrialList(dir / "trials.tsv", corpus.trials);
  return corpus;
}

}  // namespace tclsv
