// src/evaluation.cc

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

#include "tclsv/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tclsv/binary_io.h"
#include "tclsv/error.h"

namespace tclsv {

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r')
    fields.back().pop_back();
  return fields;
}

std::string Fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string Exact(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

std::string_view TrialTypeName(TrialType type) {
  switch (type) {
    case TrialType::kTarget: return "target";
    case TrialType::kTargetWrong: return "target-wrong";
    case TrialType::kImpostorCorrect: return "impostor-correct";
    case TrialType::kImpostorWrong: return "impostor-wrong";
  }
  return "?";
}

TrialType ParseTrialType(std::string_view name) {
  for (TrialType t : {TrialType::kTarget, TrialType::kTargetWrong,
                      TrialType::kImpostorCorrect, TrialType::kImpostorWrong})
    if (name == TrialTypeName(t)) return t;
  throw Error(ErrorCode::kFormat, "unknown trial type '" + std::string(name) + "'");
}

void TrialScoreSet::Validate() const {
  if (trials.size() != scores.size())
    throw Error(ErrorCode::kDimensionMismatch, "score set: trials and scores differ in length");
  for (size_t i = 0; i < scores.size(); ++i)
    if (!std::isfinite(scores[i]))
      throw Error(ErrorCode::kInvalidArgument,
                  "non-finite score for " + trials[i].model_id + " / " + trials[i].test_utterance_id);
}

void DcfParams::Validate() const {
  if (!(p_target > 0.0 && p_target < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "dcf: p_target must lie in (0, 1)");
  if (!(cost_miss > 0.0 && cost_fa > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "dcf: costs must be positive");
}

std::vector<OperatingPoint> ComputeErrorCurve(std::span<const double> target_scores,
                                              std::span<const double> nontarget_scores) {
  if (target_scores.empty() || nontarget_scores.empty())
    throw Error(ErrorCode::kEmptyScoreList,
                target_scores.empty() ? "no target scores" : "no non-target scores");
  std::vector<double> tar(target_scores.begin(), target_scores.end());
  std::vector<double> non(nontarget_scores.begin(), nontarget_scores.end());
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());

  std::vector<double> thresholds;
  thresholds.reserve(tar.size() + non.size());
  std::merge(tar.begin(), tar.end(), non.begin(), non.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<OperatingPoint> curve;
  curve.reserve(thresholds.size() + 2);
  curve.push_back({-kInf, 0.0, 1.0});
  for (double theta : thresholds) {
    const auto misses = std::lower_bound(tar.begin(), tar.end(), theta) - tar.begin();
    const auto rejected = std::lower_bound(non.begin(), non.end(), theta) - non.begin();
    curve.push_back({theta, static_cast<double>(misses) / nt,
                     (nn - static_cast<double>(rejected)) / nn});
  }
  curve.push_back({kInf, 1.0, 0.0});
  return curve;
}

double ComputeEer(const std::vector<OperatingPoint> &curve) {
  if (curve.empty()) throw Error(ErrorCode::kEmptyScoreList, "empty error curve");
  for (size_t i = 0; i < curve.size(); ++i) {
    const OperatingPoint &b = curve[i];
    if (b.p_miss < b.p_fa) continue;
    if (b.p_miss == b.p_fa || i == 0) return b.p_miss;
    const OperatingPoint &a = curve[i - 1];
    const double denom = (b.p_miss - a.p_miss) - (b.p_fa - a.p_fa);
    const double t = (a.p_fa - a.p_miss) / denom;
    return a.p_miss + t * (b.p_miss - a.p_miss);
  }
  return curve.back().p_miss;
}

double ComputeMinDcf(const std::vector<OperatingPoint> &curve, const DcfParams &params) {
  params.Validate();
  if (curve.empty()) throw Error(ErrorCode::kEmptyScoreList, "empty error curve");
  const double c_miss = params.cost_miss * params.p_target;
  const double c_fa = params.cost_fa * (1.0 - params.p_target);
  double best = std::numeric_limits<double>::infinity();
  for (const auto &p : curve) best = std::min(best, c_miss * p.p_miss + c_fa * p.p_fa);
  return best / std::min(c_miss, c_fa);
}

MetricsAverage AverageMetrics(std::span<const TypeMetrics> per_type) {
  MetricsAverage avg;
  if (per_type.empty()) return avg;
  for (const auto &m : per_type) {
    avg.eer += m.eer;
    avg.min_dcf += m.min_dcf;
  }
  avg.eer /= static_cast<double>(per_type.size());
  avg.min_dcf /= static_cast<double>(per_type.size());
  return avg;
}

EvaluationReport Evaluate(const TrialScoreSet &score_set, const DcfParams &params) {
  score_set.Validate();
  params.Validate();
  std::vector<double> targets;
  for (size_t i = 0; i < score_set.trials.size(); ++i)
    if (score_set.trials[i].ground_truth == TrialType::kTarget) targets.push_back(score_set.scores[i]);
  if (targets.empty()) throw Error(ErrorCode::kMissingTargets, "score set has no target trials");

  EvaluationReport report;
  report.num_targets = targets.size();
  report.dcf = params;
  for (TrialType type : kNonTargetTypes) {
    std::vector<double> nontargets;
    for (size_t i = 0; i < score_set.trials.size(); ++i)
      if (score_set.trials[i].ground_truth == type) nontargets.push_back(score_set.scores[i]);
    if (nontargets.empty()) continue;
    const auto curve = ComputeErrorCurve(targets, nontargets);
    report.per_type.push_back({type, nontargets.size(), ComputeEer(curve), ComputeMinDcf(curve, params)});
  }
  if (report.per_type.empty())
    throw Error(ErrorCode::kEmptyScoreList, "score set has no non-target trials");
  report.average = AverageMetrics(report.per_type);
  return report;
}

std::string FormatReportText(const EvaluationReport &report) {
  std::ostringstream os;
  os << "Non-target type [%EER/(minDCF x 100)]\n";
  os << "targets: " << report.num_targets << "\n";
  for (const auto &m : report.per_type) {
    os << "  " << TrialTypeName(m.type);
    for (size_t pad = TrialTypeName(m.type).size(); pad < 18; ++pad) os << ' ';
    os << Fixed(100.0 * m.eer, 2) << "/" << Fixed(100.0 * m.min_dcf, 3) << "  (" << m.num_nontargets
       << " trials)\n";
  }
  os << "  average           " << Fixed(100.0 * report.average.eer, 2) << "/"
     << Fixed(100.0 * report.average.min_dcf, 3) << "\n";
  os << "DCF: p_target=" << report.dcf.p_target << " c_miss=" << report.dcf.cost_miss
     << " c_fa=" << report.dcf.cost_fa << "\n";
  return os.str();
}

std::string FormatReportKeyValue(const EvaluationReport &report) {
  std::ostringstream os;
  os << "num_targets=" << report.num_targets << "\n";
  for (const auto &m : report.per_type) {
    const std::string key(TrialTypeName(m.type));
    os << key << ".num_trials=" << m.num_nontargets << "\n";
    os << key << ".eer_percent=" << Exact(100.0 * m.eer) << "\n";
    os << key << ".mindcf_x100=" << Exact(100.0 * m.min_dcf) << "\n";
  }
  os << "average.eer_percent=" << Exact(100.0 * report.average.eer) << "\n";
  os << "average.mindcf_x100=" << Exact(100.0 * report.average.min_dcf) << "\n";
  return os.str();
}

std::vector<Trial> ReadTrialList(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "trial list " + path.string());
  std::vector<Trial> trials;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 3)
      throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(lineno) +
                                          ": expected 3 tab-separated fields");
    trials.push_back({fields[0], fields[1], ParseTrialType(fields[2])});
  }
  return trials;
}

void WriteScoreFile(const std::filesystem::path &path, const TrialScoreSet &score_set) {
  score_set.Validate();
  std::ostringstream os;
  for (size_t i = 0; i < score_set.trials.size(); ++i) {
    const Trial &t = score_set.trials[i];
    os << t.model_id << '\t' << t.test_utterance_id << '\t' << TrialTypeName(t.ground_truth)
       << '\t' << Exact(score_set.scores[i]) << '\n';
  }
  WriteFileAtomic(path, os.str());
}

TrialScoreSet ReadScoreFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingArtifact, "score file " + path.string());
  TrialScoreSet set;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = SplitTabs(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (fields.size() != 4) throw Error(ErrorCode::kFormat, where + ": expected 4 fields");
    set.trials.push_back({fields[0], fields[1], ParseTrialType(fields[2])});
    try {
      size_t used = 0;
      set.scores.push_back(std::stod(fields[3], &used));
      if (used != fields[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
      throw Error(ErrorCode::kFormat, where + ": bad score '" + fields[3] + "'");
    }
  }
  set.Validate();
  return set;
}

}  // namespace tclsv
