// tests/unit/evaluation_test.cc

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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "test_util.h"
#include "tclsv/error.h"

namespace tclsv {
namespace {

struct Point {
  double p_miss, p_fa;
};

// Every threshold is tried directly: -inf, each observed score, +inf.
std::vector<Point> BruteForcePoints(const std::vector<double> &tar, const std::vector<double> &non) {
  std::vector<double> thresholds = {-std::numeric_limits<double>::infinity()};
  thresholds.insert(thresholds.end(), tar.begin(), tar.end());
  thresholds.insert(thresholds.end(), non.begin(), non.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<Point> pts;
  for (double th : thresholds) {
    double miss = 0, fa = 0;
    for (double s : tar) miss += s < th;
    for (double s : non) fa += s >= th;
    pts.push_back({miss / tar.size(), fa / non.size()});
  }
  return pts;
}

double BruteForceEer(const std::vector<Point> &pts) {
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d0 = pts[i].p_miss - pts[i].p_fa, d1 = pts[i + 1].p_miss - pts[i + 1].p_fa;
    if (d0 == 0) return pts[i].p_miss;
    if (d0 < 0 && d1 >= 0) {
      const double a = -d0 / (d1 - d0);
      return pts[i].p_miss + a * (pts[i + 1].p_miss - pts[i].p_miss);
    }
  }
  return pts.back().p_miss;
}

double BruteForceMinDcf(const std::vector<Point> &pts, const DcfParams &p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto &pt : pts)
    best = std::min(best, p.cost_miss * p.p_target * pt.p_miss + p.cost_fa * (1 - p.p_target) * pt.p_fa);
  return best / std::min(p.cost_miss * p.p_target, p.cost_fa * (1 - p.p_target));
}

TEST(ErrorCurveTest, SeparableScoresReachZeroZero) {
  const std::vector<double> tar = {1, 2}, non = {-1, -2};
  bool found = false;
  for (const auto &p : ComputeErrorCurve(tar, non)) found |= p.p_miss == 0 && p.p_fa == 0;
  EXPECT_TRUE(found);
  EXPECT_EQ(ComputeEer(ComputeErrorCurve(tar, non)), 0.0);
  EXPECT_EQ(ComputeMinDcf(ComputeErrorCurve(tar, non), DcfParams{}), 0.0);
}

TEST(ErrorCurveTest, IdenticalScoresGiveOnlyDegeneratePoints) {
  const std::vector<double> tar(4, 0.5), non(7, 0.5);
  const auto curve = ComputeErrorCurve(tar, non);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_EQ(curve[0].p_miss, 0.0);
  EXPECT_EQ(curve[0].p_fa, 1.0);
  EXPECT_EQ(curve[1].threshold, 0.5);
  EXPECT_EQ(curve[1].p_miss, 0.0);
  EXPECT_EQ(curve[1].p_fa, 1.0);
  EXPECT_EQ(curve[2].p_miss, 1.0);
  EXPECT_EQ(curve[2].p_fa, 0.0);
  EXPECT_DOUBLE_EQ(ComputeEer(curve), 0.5);
}

TEST(ErrorCurveTest, MatchesBruteForceOnRandomScores) {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> tar(20), non(20);
    for (double &s : tar) s = std::round(4 * (rng.Gaussian() + 1.0)) / 4;  // ties on purpose
    for (double &s : non) s = std::round(4 * rng.Gaussian()) / 4;
    const auto curve = ComputeErrorCurve(tar, non);
    const auto pts = BruteForcePoints(tar, non);
    ASSERT_EQ(curve.size(), pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
      EXPECT_NEAR(curve[i].p_miss, pts[i].p_miss, 1e-15);
      EXPECT_NEAR(curve[i].p_fa, pts[i].p_fa, 1e-15);
    }
    EXPECT_NEAR(ComputeEer(curve), BruteForceEer(pts), 1e-10);
    EXPECT_NEAR(ComputeMinDcf(curve, DcfParams{}), BruteForceMinDcf(pts, DcfParams{}), 1e-10);
  }
}

TEST(ErrorCurveTest, EmptyListsThrow) {
  const std::vector<double> some = {1.0}, none;
  for (auto [a, b] : {std::pair{&some, &none}, std::pair{&none, &some}}) {
    try {
      ComputeErrorCurve(*a, *b);
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::kEmptyScoreList);
    }
  }
}

TEST(EerTest, ThreeByThreeExample) {
  const std::vector<double> tar = {0.9, 0.8, 0.2}, non = {0.7, 0.1, 0.05};
  EXPECT_NEAR(ComputeEer(ComputeErrorCurve(tar, non)), 1.0 / 3, 1e-15);
  EXPECT_NEAR(BruteForceEer(BruteForcePoints(tar, non)), 1.0 / 3, 1e-15);
}

TEST(EerTest, FullyOverlappingSetsGiveHalf) {
  const std::vector<double> s = {1, 2, 3, 4, 5, 6};
  EXPECT_NEAR(ComputeEer(ComputeErrorCurve(s, s)), 0.5, 1e-15);
}

TEST(EerTest, InvariantUnderMonotoneTransform) {
  Rng rng(2);
  std::vector<double> tar(25), non(40);
  for (double &s : tar) s = rng.Gaussian() + 1.0;
  for (double &s : non) s = rng.Gaussian();
  auto f = [](double x) { return std::exp(0.7 * x) - 3.0; };
  std::vector<double> ft(tar), fn(non);
  for (double &s : ft) s = f(s);
  for (double &s : fn) s = f(s);
  EXPECT_NEAR(ComputeEer(ComputeErrorCurve(tar, non)), ComputeEer(ComputeErrorCurve(ft, fn)), 1e-12);
  EXPECT_NEAR(ComputeMinDcf(ComputeErrorCurve(tar, non), DcfParams{}),
              ComputeMinDcf(ComputeErrorCurve(ft, fn), DcfParams{}), 1e-12);
}

TEST(MinDcfTest, TwoPointCurve) {
  const std::vector<OperatingPoint> curve = {{-1, 0.0, 1.0}, {1, 1.0, 0.0}};
  const DcfParams p;
  const double expect = std::min(p.cost_miss * p.p_target, p.cost_fa * (1 - p.p_target)) /
                        std::min(p.cost_miss * p.p_target, p.cost_fa * (1 - p.p_target));
  EXPECT_DOUBLE_EQ(ComputeMinDcf(curve, p), expect);
  DcfParams q;
  q.p_target = 0.5;
  q.cost_miss = 1.0;
  q.cost_fa = 3.0;
  EXPECT_DOUBLE_EQ(ComputeMinDcf(curve, q), 1.0);
}

TEST(AverageMetricsTest, PublishedRowsAverageAsReported) {
  auto row = [](double a, double b, double c, double da, double db, double dc) {
    return std::vector<TypeMetrics>{{TrialType::kTargetWrong, 1, a / 100, da / 100},
                                    {TrialType::kImpostorCorrect, 1, b / 100, db / 100},
                                    {TrialType::kImpostorWrong, 1, c / 100, dc / 100}};
  };
  const auto s = AverageMetrics(row(4.33, 3.02, 1.14, 1.662, 1.384, 0.391));
  EXPECT_NEAR(100 * s.eer, 2.83, 0.005);
  EXPECT_NEAR(100 * s.min_dcf, 1.145, 0.001);
  const auto u = AverageMetrics(row(1.88, 3.14, 0.64, 0.654, 1.444, 0.195));
  EXPECT_NEAR(100 * u.eer, 1.89, 0.005);
  EXPECT_NEAR(100 * u.min_dcf, 0.764, 0.001);
}

TrialScoreSet MakeSet(const std::vector<std::pair<TrialType, double>> &items) {
  TrialScoreSet s;
  for (size_t i = 0; i < items.size(); ++i) {
    s.trials.push_back({"m", "t" + std::to_string(i), items[i].first});
    s.scores.push_back(items[i].second);
  }
  return s;
}

TEST(EvaluateTest, SingleTypeAverageEqualsThatType) {
  const auto set = MakeSet({{TrialType::kTarget, 0.9}, {TrialType::kTarget, 0.8}, {TrialType::kTarget, 0.2},
                            {TrialType::kImpostorWrong, 0.7}, {TrialType::kImpostorWrong, 0.1},
                            {TrialType::kImpostorWrong, 0.05}});
  const EvaluationReport r = Evaluate(set, DcfParams{});
  ASSERT_EQ(r.per_type.size(), 1u);
  EXPECT_EQ(r.num_targets, 3u);
  EXPECT_EQ(r.per_type[0].type, TrialType::kImpostorWrong);
  EXPECT_NEAR(r.per_type[0].eer, 1.0 / 3, 1e-15);
  EXPECT_EQ(r.average.eer, r.per_type[0].eer);
  EXPECT_EQ(r.average.min_dcf, r.per_type[0].min_dcf);
}

TEST(EvaluateTest, EachTypeScoredAgainstAllTargets) {
  Rng rng(3);
  std::vector<std::pair<TrialType, double>> items;
  std::vector<double> tar, per[3];
  for (int i = 0; i < 30; ++i) tar.push_back(rng.Gaussian() + 2), items.push_back({TrialType::kTarget, tar.back()});
  for (int t = 0; t < 3; ++t)
    for (int i = 0; i < 10 + 5 * t; ++i) {
      per[t].push_back(rng.Gaussian() + t);
      items.push_back({kNonTargetTypes[t], per[t].back()});
    }
  const EvaluationReport r = Evaluate(MakeSet(items), DcfParams{});
  ASSERT_EQ(r.per_type.size(), 3u);
  double sum = 0;
  for (int t = 0; t < 3; ++t) {
    EXPECT_EQ(r.per_type[t].num_nontargets, per[t].size());
    EXPECT_NEAR(r.per_type[t].eer, BruteForceEer(BruteForcePoints(tar, per[t])), 1e-10);
    sum += r.per_type[t].eer;
  }
  EXPECT_NEAR(r.average.eer, sum / 3, 1e-15);
  const std::string kv = FormatReportKeyValue(r);
  EXPECT_NE(kv.find("impostor-correct.eer_percent="), std::string::npos);
  EXPECT_NE(kv.find("average.mindcf_x100="), std::string::npos);
  EXPECT_NE(FormatReportText(r).find("average"), std::string::npos);
}

TEST(EvaluateTest, MissingTargetsOrNonTargetsThrow) {
  try {
    Evaluate(MakeSet({{TrialType::kTargetWrong, 0.1}}), DcfParams{});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingTargets);
  }
  try {
    Evaluate(MakeSet({{TrialType::kTarget, 0.1}}), DcfParams{});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyScoreList);
  }
}

TEST(TrialTypeTest, NamesRoundTrip) {
  for (TrialType t : {TrialType::kTarget, TrialType::kTargetWrong, TrialType::kImpostorCorrect,
                      TrialType::kImpostorWrong})
    EXPECT_EQ(ParseTrialType(TrialTypeName(t)), t);
  EXPECT_THROW(ParseTrialType("impostor"), Error);
}

TEST(ScoreFileTest, RoundTripIsExact) {
  const auto dir = testing::FreshDir("scores");
  Rng rng(4);
  std::vector<std::pair<TrialType, double>> items;
  for (int i = 0; i < 20; ++i) items.push_back({i % 2 ? TrialType::kTarget : TrialType::kImpostorCorrect, rng.Gaussian()});
  const auto set = MakeSet(items);
  WriteScoreFile(dir / "s.txt", set);
  const TrialScoreSet back = ReadScoreFile(dir / "s.txt");
  EXPECT_EQ(back.scores, set.scores);
  ASSERT_EQ(back.trials.size(), set.trials.size());
  EXPECT_EQ(back.trials[3].test_utterance_id, "t3");
  EXPECT_EQ(back.trials[3].ground_truth, TrialType::kTarget);
}

}  // namespace
}  // namespace tclsv
