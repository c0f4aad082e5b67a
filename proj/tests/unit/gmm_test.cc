// tests/unit/gmm_test.cc

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

#include "tclsv/gmm.h"

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.h"
#include "tclsv/error.h"

namespace tclsv {
namespace {

GmmModel RandomModel(int k, int d, Rng &rng) {
  GmmModel m;
  m.weights = Vector::NullaryExpr(k, [&] { return rng.Uniform(0.1, 1.0); });
  m.weights /= m.weights.sum();
  m.means = testing::RandomMatrix(k, d, rng, 2.0);
  m.variances = Matrix::NullaryExpr(k, d, [&] { return rng.Uniform(0.3, 3.0); });
  return m;
}

// Plain density sum, no log-sum-exp.
double NaiveLogLikelihood(const GmmModel &m, const RowVector &x) {
  double p = 0.0;
  for (Eigen::Index k = 0; k < m.NumComponents(); ++k) {
    double dens = m.weights[k];
    for (Eigen::Index j = 0; j < m.Dim(); ++j) {
      const double v = m.variances(k, j), diff = x[j] - m.means(k, j);
      dens *= std::exp(-0.5 * diff * diff / v) / std::sqrt(2.0 * M_PI * v);
    }
    p += dens;
  }
  return std::log(p);
}

Matrix TwoClusters(int n, double sep, Rng &rng) {
  Matrix x(n, 2);
  for (int i = 0; i < n; ++i) {
    const double c = i % 2 ? sep : -sep;
    x.row(i) << c + rng.Gaussian(), 0.5 * c + rng.Gaussian();
  }
  return x;
}

TEST(LogLikelihoodTest, StandardNormalAtOrigin) {
  GmmModel m;
  m.weights = Vector::Ones(1);
  m.means = Matrix::Zero(1, 1);
  m.variances = Matrix::Ones(1, 1);
  EXPECT_NEAR(LogLikelihood(m, RowVector::Zero(1)), -0.91893853320467274, 1e-14);
}

TEST(LogLikelihoodTest, DuplicatedComponentCollapses) {
  Rng rng(1);
  GmmModel one = RandomModel(1, 3, rng);
  GmmModel two;
  two.weights = Vector::Constant(2, 0.5);
  two.means = Matrix(2, 3);
  two.means << one.means, one.means;
  two.variances = Matrix(2, 3);
  two.variances << one.variances, one.variances;
  const RowVector x = testing::RandomMatrix(1, 3, rng);
  EXPECT_NEAR(LogLikelihood(two, x), LogLikelihood(one, x), 1e-14);
}

TEST(LogLikelihoodTest, MatchesNaiveSummation) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const GmmModel m = RandomModel(1 + static_cast<int>(rng.UniformInt(6)), 1 + static_cast<int>(rng.UniformInt(4)), rng);
    const RowVector x = testing::RandomMatrix(1, m.Dim(), rng);
    EXPECT_NEAR(LogLikelihood(m, x), NaiveLogLikelihood(m, x), 1e-10);
  }
}

TEST(LogLikelihoodTest, FarFramesStayFinite) {
  Rng rng(3);
  const GmmModel m = RandomModel(3, 2, rng);
  RowVector x(2);
  x << 1e4, -1e4;
  EXPECT_TRUE(std::isfinite(LogLikelihood(m, x)));
}

TEST(InitGmmTest, SingleComponentIsDataMoments) {
  Rng rng(4);
  const Matrix x = testing::RandomMatrix(300, 3, rng, 2.0);
  const GmmModel m = InitGmm(x, 1, 5);
  const RowVector mean = x.colwise().mean();
  const RowVector var = (x.rowwise() - mean).array().square().colwise().mean();
  EXPECT_LE((m.means.row(0) - mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((m.variances.row(0) - var).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(m.weights[0], 1.0);
}

TEST(InitGmmTest, SeedIsDeterministic) {
  Rng rng(5);
  const Matrix x = testing::RandomMatrix(200, 2, rng);
  EXPECT_EQ(InitGmm(x, 4, 9).means, InitGmm(x, 4, 9).means);
}

TEST(InitGmmTest, DistinctPointsBecomeMeans) {
  Matrix x(4, 2);
  x << 0, 0, 10, 0, 0, 10, 10, 10;
  const GmmModel m = InitGmm(x, 4, 3);
  std::vector<bool> hit(4, false);
  for (int k = 0; k < 4; ++k)
    for (int p = 0; p < 4; ++p)
      if ((m.means.row(k) - x.row(p)).norm() < 1e-12) hit[p] = true;
  EXPECT_EQ(hit, std::vector<bool>(4, true));
}

TEST(InitGmmTest, TooFewFramesThrows) {
  try {
    InitGmm(Matrix::Zero(3, 2), 4, 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewFrames);
  }
}

TEST(EmStepTest, SingleComponentLandsOnSampleMoments) {
  Rng rng(6);
  const Matrix x = testing::RandomMatrix(250, 4, rng, 1.5);
  GmmModel m = RandomModel(1, 4, rng);
  const GmmModel next = EmStep(m, x, Vector::Constant(4, 1e-6)).model;
  const RowVector mean = x.colwise().mean();
  const RowVector var = (x.rowwise() - mean).array().square().colwise().mean();
  EXPECT_LE((next.means.row(0) - mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((next.variances.row(0) - var).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EmStepTest, LogLikelihoodIsNonDecreasing) {
  Rng rng(7);
  const Matrix x = TwoClusters(1000, 3.0, rng);
  const UbmTrainResult r = TrainUbm(x, 2, 15, 11);
  ASSERT_EQ(r.log_likelihood_trace.size(), 15u);
  for (size_t i = 1; i < r.log_likelihood_trace.size(); ++i)
    EXPECT_GE(r.log_likelihood_trace[i], r.log_likelihood_trace[i - 1] - 1e-9);
}

TEST(EmStepTest, VarianceFloorIsApplied) {
  Matrix x(40, 1);
  for (int i = 0; i < 40; ++i) x(i, 0) = i < 20 ? 0.0 : 100.0;  // zero-variance clusters
  GmmModel m;
  m.weights = Vector::Constant(2, 0.5);
  m.means = Matrix(2, 1);
  m.means << 0.0, 100.0;
  m.variances = Matrix::Ones(2, 1);
  const Vector floor = VarianceFloor(x);
  EXPECT_NEAR(floor[0], 1e-3 * 2500.0, 1e-9);
  const GmmModel next = EmStep(m, x, floor).model;
  EXPECT_NEAR(next.variances(0, 0), floor[0], 1e-12);
  EXPECT_NEAR(next.variances(1, 0), floor[0], 1e-12);
}

TEST(TrainUbmTest, RecoversTwoSeparatedClusters) {
  Rng rng(8);
  const Matrix x = TwoClusters(4000, 4.0, rng);
  const GmmModel m = TrainUbm(x, 2, 10, 3).model;
  RowVector a(2), b(2);
  a << -4.0, -2.0;
  b << 4.0, 2.0;
  const int ia = (m.means.row(0) - a).norm() < (m.means.row(1) - a).norm() ? 0 : 1;
  EXPECT_LT((m.means.row(ia) - a).cwiseAbs().maxCoeff(), 0.1);
  EXPECT_LT((m.means.row(1 - ia) - b).cwiseAbs().maxCoeff(), 0.1);
  EXPECT_NEAR(m.weights.sum(), 1.0, 1e-12);
}

TEST(TrainUbmTest, ZeroIterationsReturnsInit) {
  Rng rng(9);
  const Matrix x = testing::RandomMatrix(100, 2, rng);
  const GmmModel a = TrainUbm(x, 3, 0, 4).model;
  const GmmModel b = InitGmm(x, 3, 4);
  EXPECT_EQ(a.means, b.means);
  EXPECT_EQ(a.variances, b.variances);
}

TEST(MapAdaptTest, HugeRelevanceKeepsMeans) {
  Rng rng(10);
  const GmmModel ubm = RandomModel(4, 3, rng);
  MapConfig cfg;
  cfg.relevance_factor = 1e12;
  const GmmModel m = MapAdapt(ubm, testing::RandomMatrix(50, 3, rng, 3.0), cfg);
  EXPECT_LE((m.means - ubm.means).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(m.weights, ubm.weights);
  EXPECT_EQ(m.variances, ubm.variances);
}

TEST(MapAdaptTest, AbundantDataMovesSingleMeanToEnrollmentMean) {
  Rng rng(11);
  GmmModel ubm;
  ubm.weights = Vector::Ones(1);
  ubm.means = Matrix::Zero(1, 1);
  ubm.variances = Matrix::Ones(1, 1);
  Matrix x(5000, 1);
  for (int i = 0; i < 5000; ++i) x(i, 0) = 3.0 + rng.Gaussian();
  const GmmModel m = MapAdapt(ubm, x, MapConfig{});
  const double target = x.mean();
  EXPECT_LT(std::abs(m.means(0, 0) - target), 0.01 * std::abs(target));
}

TEST(MapAdaptTest, SingleComponentMatchesClosedFormIterations) {
  GmmModel ubm;
  ubm.weights = Vector::Ones(1);
  ubm.means = Matrix::Zero(1, 1);
  ubm.variances = Matrix::Ones(1, 1);
  Matrix x(20, 1);
  for (int i = 0; i < 20; ++i) x(i, 0) = 1.0 + 0.1 * i;
  const double n = 20, r = 10, xbar = x.mean();
  double mu = 0.0;
  for (int it = 0; it < 3; ++it) mu = n / (n + r) * xbar + r / (n + r) * mu;
  EXPECT_NEAR(MapAdapt(ubm, x, MapConfig{}).means(0, 0), mu, 1e-12);
}

TEST(MapAdaptTest, EmptyEnrollmentThrows) {
  Rng rng(12);
  try {
    MapAdapt(RandomModel(2, 2, rng), Matrix(0, 2), MapConfig{});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyEnrollment);
  }
}

TEST(ScoreLlrTest, IdenticalModelsScoreExactlyZero) {
  Rng rng(13);
  const GmmModel m = RandomModel(5, 3, rng);
  EXPECT_EQ(ScoreLlr(m, m, testing::RandomMatrix(40, 3, rng)), 0.0);
}

TEST(ScoreLlrTest, SingleFrameIsLogRatio) {
  Rng rng(14);
  const GmmModel a = RandomModel(3, 2, rng), b = RandomModel(3, 2, rng);
  const Matrix y = testing::RandomMatrix(1, 2, rng);
  EXPECT_NEAR(ScoreLlr(a, b, y), NaiveLogLikelihood(a, y.row(0)) - NaiveLogLikelihood(b, y.row(0)), 1e-10);
}

TEST(ScoreLlrTest, PermutationAndDuplicationInvariant) {
  Rng rng(15);
  const GmmModel a = RandomModel(3, 2, rng), b = RandomModel(4, 2, rng);
  const Matrix y = testing::RandomMatrix(30, 2, rng);
  Matrix rev = y.colwise().reverse();
  Matrix dup(60, 2);
  dup << y, y;
  const double s = ScoreLlr(a, b, y);
  EXPECT_NEAR(ScoreLlr(a, b, rev), s, 1e-12);
  EXPECT_NEAR(ScoreLlr(a, b, dup), s, 1e-12);
}

TEST(ScoreLlrTest, EmptyUtteranceThrows) {
  Rng rng(16);
  const GmmModel m = RandomModel(2, 2, rng);
  try {
    ScoreLlr(m, m, Matrix(0, 2));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyUtterance);
  }
}

TEST(GmmModelTest, ValidateRejectsBadModels) {
  Rng rng(17);
  GmmModel m = RandomModel(2, 2, rng);
  m.Validate();
  m.variances(0, 0) = 0.0;
  EXPECT_THROW(m.Validate(), Error);
  m = RandomModel(2, 2, rng);
  m.weights[0] += 0.5;
  EXPECT_THROW(m.Validate(), Error);
}

}  // namespace
}  // namespace tclsv
