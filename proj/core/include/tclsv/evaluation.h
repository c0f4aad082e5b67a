// tclsv/evaluation.h

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

#ifndef TCLSV_EVALUATION_H_
#define TCLSV_EVALUATION_H_

// Detection metrics for verification trials. A trial is accepted when its
// score is >= the threshold, so tied scores always flip together.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tclsv {

enum class TrialType { kTarget, kTargetWrong, kImpostorCorrect, kImpostorWrong };

inline constexpr TrialType kNonTargetTypes[] = {
    TrialType::kTargetWrong, TrialType::kImpostorCorrect, TrialType::kImpostorWrong};

std::string_view TrialTypeName(TrialType type);
/// "target", "target-wrong", "impostor-correct" or "impostor-wrong".
TrialType ParseTrialType(std::string_view name);

struct Trial {
  std::string model_id;
  std::string test_utterance_id;
  TrialType ground_truth = TrialType::kTarget;
};

struct TrialScoreSet {
  std::vector<Trial> trials;
  std::vector<double> scores;  // aligned with trials

  void Validate() const;
};

struct DcfParams {
  double p_target = 0.01;
  double cost_miss = 10.0;
  double cost_fa = 1.0;

  void Validate() const;
};

struct OperatingPoint {
  double threshold;
  double p_miss;
  double p_fa;
};

/// Operating points at -inf, at every distinct score, and at +inf, in
/// increasing threshold order. Throws EmptyScoreList.
std::vector<OperatingPoint> ComputeErrorCurve(std::span<const double> target_scores,
                                              std::span<const double> nontarget_scores);

/// Miss/false-alarm crossing, linearly interpolated between the two
/// adjacent operating points that bracket it.
double ComputeEer(const std::vector<OperatingPoint> &curve);

/// min over the curve of C_miss P_miss p + C_fa P_fa (1 - p), divided by
/// min(C_miss p, C_fa (1 - p)).
double ComputeMinDcf(const std::vector<OperatingPoint> &curve, const DcfParams &params);

struct TypeMetrics {
  TrialType type;
  size_t num_nontargets = 0;
  double eer = 0.0;      // fraction in [0, 1]
  double min_dcf = 0.0;  // normalized
};

struct MetricsAverage {
  double eer = 0.0;
  double min_dcf = 0.0;
};

/// Unweighted mean over the given per-type metrics.
MetricsAverage AverageMetrics(std::span<const TypeMetrics> per_type);

struct EvaluationReport {
  size_t num_targets = 0;
  std::vector<TypeMetrics> per_type;  // only the non-target types present
  MetricsAverage average;
  DcfParams dcf;
};

/// Each present non-target type is scored against all target trials.
/// Throws MissingTargets without target trials, EmptyScoreList without any
/// non-target trial.
EvaluationReport Evaluate(const TrialScoreSet &score_set, const DcfParams &params);

/// Table in the "%EER / minDCF x 100" layout.
std::string FormatReportText(const EvaluationReport &report);
/// One "key=value" line per metric.
std::string FormatReportKeyValue(const EvaluationReport &report);

// Trial list: "<model_id>\t<test_utterance_id>\t<type>" per line.
// Score file: the same three fields plus "\t<score>".
std::vector<Trial> ReadTrialList(const std::filesystem::path &path);
void WriteScoreFile(const std::filesystem::path &path, const TrialScoreSet &score_set);
TrialScoreSet ReadScoreFile(const std::filesystem::path &path);

}  // namespace tclsv

#endif  // TCLSV_EVALUATION_H_
