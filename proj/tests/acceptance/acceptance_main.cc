// tests/acceptance/acceptance_main.cc

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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Usage: acceptance_test [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "tclsv/binary_io.h"
#include "tclsv/bottleneck.h"
#include "tclsv/config.h"
#include "tclsv/error.h"
#include "tclsv/evaluation.h"
#include "tclsv/gmm.h"
#include "tclsv/neural_net.h"
#include "tclsv/pipeline.h"
#include "tclsv/random.h"
#include "tclsv/synthetic_corpus.h"
#include "tclsv/tcl_labeling.h"

namespace {

namespace fs = std::filesystem;
using namespace tclsv;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char *fmt, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

Matrix Gaussians(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Gaussian();
  return m;
}

// ---------------------------------------------------------------- 1
Outcome GradientCheck() {
  const auto start = Clock::now();
  NetworkArch arch;
  arch.input_dim = 5;
  arch.hidden_layers = {8, 8};
  arch.heads = {{"out", 3}};
  Rng rng(101);
  double worst = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    NetworkParams p = InitNetwork(arch, 1000 + draw);
    Vector theta = p.layers.Flatten();
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] += 0.5 * rng.Gaussian();
    p.layers.Unflatten(theta);
    const Matrix x = Gaussians(16, 5, rng);
    std::vector<std::vector<int>> labels(1, std::vector<int>(16));
    for (int &l : labels[0]) l = static_cast<int>(rng.UniformInt(3));

    const Vector analytic = Backward(p, x, labels, {}).gradients.Flatten();
    Vector numeric(theta.size());
    const double eps = 1e-5;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Vector t = theta;
      t[i] += eps;
      p.layers.Unflatten(t);
      const double up = Loss(Forward(p, x).log_posteriors, labels, {});
      t[i] = theta[i] - eps;
      p.layers.Unflatten(t);
      const double down = Loss(Forward(p, x).log_posteriors, labels, {});
      numeric[i] = (up - down) / (2 * eps);
    }
    const double rel = (analytic - numeric).norm() / std::max(analytic.norm(), numeric.norm());
    worst = std::max(worst, rel);
  }
  const double secs = Seconds(start);
  return {worst <= 1e-5 && secs < 10.0,
          Fmt("max relative error %.3g over 20 draws (<= 1e-5), %.2f s (< 10 s)", worst, secs)};
}

// ---------------------------------------------------------------- 2
Outcome EmMonotonicity() {
  const auto start = Clock::now();
  Rng rng(202);
  const double centers[3][2] = {{-4, 0}, {3, 3}, {2, -4}};
  const double scales[3] = {1.0, 0.6, 1.4};
  Matrix x(2000, 2);
  for (int t = 0; t < 2000; ++t) {
    const double u = rng.Uniform();
    const int k = u < 0.5 ? 0 : (u < 0.8 ? 1 : 2);
    x.row(t) << centers[k][0] + scales[k] * rng.Gaussian(), centers[k][1] + scales[k] * rng.Gaussian();
  }
  GmmModel model = InitGmm(x, 3, 7);
  const Vector floor = VarianceFloor(x);
  std::vector<double> trace;
  for (int step = 0; step < 15; ++step) {
    EmStepResult r = EmStep(model, x, floor);
    trace.push_back(r.log_likelihood);
    model = std::move(r.model);
  }
  double final_ll = 0.0;
  Responsibilities(model, x, &final_ll);
  trace.push_back(final_ll);
  double worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (size_t i = 1; i < trace.size(); ++i) {
    const double gain = trace[i] - trace[i - 1];
    worst = std::min(worst, gain);
    ok = ok && gain >= -1e-6 * std::abs(trace[i - 1]);
  }
  const double secs = Seconds(start);
  return {ok && secs < 5.0, Fmt("log-likelihood %.4f -> %.4f, smallest step change %.3g, %.2f s (< 5 s)",
                                trace.front(), trace.back(), worst, secs)};
}

// ---------------------------------------------------------------- 3
Outcome MapLimits() {
  Rng rng(303);
  GmmModel ubm;
  ubm.weights = Vector::Constant(4, 0.25);
  ubm.means = Gaussians(4, 3, rng) * 2.0;
  ubm.variances = Matrix::Constant(4, 3, 1.5);
  MapConfig stiff;
  stiff.relevance_factor = 1e12;
  const GmmModel frozen = MapAdapt(ubm, Gaussians(300, 3, rng), stiff);
  const double drift = (frozen.means - ubm.means).cwiseAbs().maxCoeff();

  GmmModel one;
  one.weights = Vector::Ones(1);
  one.means = Matrix::Constant(1, 2, 0.75);
  one.variances = Matrix::Ones(1, 2);
  Matrix enroll = Gaussians(40, 2, rng);
  enroll.array() += 2.0;
  MapConfig half;
  half.relevance_factor = 40.0;  // n_k = r
  half.iterations = 1;
  const GmmModel adapted = MapAdapt(one, enroll, half);
  const RowVector expect = (enroll.colwise().mean() + one.means.row(0)) / 2.0;
  const double err = (adapted.means.row(0) - expect).cwiseAbs().maxCoeff();
  return {drift <= 1e-9 && err <= 1e-12,
          Fmt("r=1e12 drift %.3g (<= 1e-9); n=r half-way error %.3g (<= 1e-12)", drift, err)};
}

// ---------------------------------------------------------------- 4
Outcome LlrIdentity() {
  Rng rng(404);
  Matrix data = Gaussians(500, 4, rng);
  const GmmModel ubm = TrainUbm(data, 6, 5, 1).model;
  MapConfig cfg;
  Matrix enroll = Gaussians(80, 4, rng);
  enroll.array() += 0.7;
  const GmmModel target = MapAdapt(ubm, enroll, cfg);
  double worst_self = 0.0, worst_perm = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix utt = Gaussians(20 + trial * 7, 4, rng);
    worst_self = std::max(worst_self, std::abs(ScoreLlr(ubm, ubm, utt)));
    std::vector<Eigen::Index> order(static_cast<size_t>(utt.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    rng.Shuffle(std::span<Eigen::Index>(order));
    Matrix permuted(utt.rows(), utt.cols());
    for (size_t i = 0; i < order.size(); ++i) permuted.row(static_cast<Eigen::Index>(i)) = utt.row(order[i]);
    worst_perm = std::max(worst_perm, std::abs(ScoreLlr(target, ubm, utt) - ScoreLlr(target, ubm, permuted)));
  }
  return {worst_self == 0.0 && worst_perm <= 1e-12,
          Fmt("max |LLR(ubm,ubm)| %.3g (== 0); permutation difference %.3g (<= 1e-12)", worst_self, worst_perm)};
}

// ---------------------------------------------------------------- 5
struct SweepPoint {
  double p_miss, p_fa;
};

std::vector<SweepPoint> Sweep(const std::vector<double> &tar, const std::vector<double> &non) {
  std::vector<double> th(tar);
  th.insert(th.end(), non.begin(), non.end());
  th.push_back(-std::numeric_limits<double>::infinity());
  th.push_back(std::numeric_limits<double>::infinity());
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  std::vector<SweepPoint> pts;
  for (double t : th) {
    const double miss = static_cast<double>(std::count_if(tar.begin(), tar.end(), [&](double s) { return s < t; }));
    const double fa = static_cast<double>(std::count_if(non.begin(), non.end(), [&](double s) { return s >= t; }));
    pts.push_back({miss / static_cast<double>(tar.size()), fa / static_cast<double>(non.size())});
  }
  return pts;
}

double SweepEer(const std::vector<SweepPoint> &pts) {
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double d0 = pts[i].p_miss - pts[i].p_fa, d1 = pts[i + 1].p_miss - pts[i + 1].p_fa;
    if (d0 == 0) return pts[i].p_miss;
    if (d0 < 0 && d1 >= 0) return pts[i].p_miss + (-d0 / (d1 - d0)) * (pts[i + 1].p_miss - pts[i].p_miss);
  }
  return pts.back().p_miss;
}

double SweepMinDcf(const std::vector<SweepPoint> &pts, const DcfParams &p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto &pt : pts)
    best = std::min(best, p.cost_miss * p.p_target * pt.p_miss + p.cost_fa * (1 - p.p_target) * pt.p_fa);
  return best / std::min(p.cost_miss * p.p_target, p.cost_fa * (1 - p.p_target));
}

Outcome MetricOracles() {
  const auto start = Clock::now();
  Rng rng(505);
  double worst_eer = 0.0, worst_dcf = 0.0;
  const DcfParams params;
  for (int set = 0; set < 50; ++set) {
    std::vector<double> tar(20), non(30);
    const double shift = rng.Uniform(0.0, 3.0);
    for (double &s : tar) s = rng.Gaussian() + shift;
    for (double &s : non) s = rng.Gaussian();
    const auto curve = ComputeErrorCurve(tar, non);
    const auto pts = Sweep(tar, non);
    worst_eer = std::max(worst_eer, std::abs(ComputeEer(curve) - SweepEer(pts)));
    worst_dcf = std::max(worst_dcf, std::abs(ComputeMinDcf(curve, params) - SweepMinDcf(pts, params)));
  }
  const double secs = Seconds(start);
  return {worst_eer <= 1e-10 && worst_dcf <= 1e-10 && secs < 5.0,
          Fmt("max EER diff %.3g, max minDCF diff %.3g (<= 1e-10), %.3f s (< 5 s)", worst_eer, worst_dcf, secs)};
}

// ---------------------------------------------------------------- 6
Outcome LabelingOracles() {
  Rng rng(606);
  int bad_stream = 0;
  for (int c = 0; c < 1000; ++c) {
    const int d = 1 + static_cast<int>(rng.UniformInt(20));
    const int n = 2 + static_cast<int>(rng.UniformInt(19));
    const int total = d + static_cast<int>(rng.UniformInt(2000));
    std::vector<FeatureMatrix> utts;
    for (int left = total, u = 0; left > 0; ++u) {
      const int len = std::min(left, 1 + static_cast<int>(rng.UniformInt(150)));
      FeatureMatrix f;
      f.utterance_id = "u" + std::to_string(u);
      f.frames = Matrix::Zero(len, 1);
      utts.push_back(std::move(f));
      left -= len;
    }
    TclConfig cfg;
    cfg.mode = TclMode::kStream;
    cfg.num_classes = n;
    cfg.frames_per_segment = d;
    cfg.shuffle_seed = rng.NextU64();
    const LabeledFrames out = AssignStreamLabels(utts, cfg);
    bool ok = out.labels.size() == static_cast<size_t>(total / d * d);
    for (size_t f = 0; ok && f < out.labels.size(); ++f) ok = out.labels[f] == static_cast<int>((f / d) % n);
    bad_stream += !ok;
  }
  int bad_utt = 0, checked = 0;
  for (int n = 2; n <= 30; ++n) {
    for (int t = n; t <= 500; ++t) {
      FeatureMatrix f;
      f.frames = Matrix::Zero(t, 1);
      const auto labels = AssignUtteranceLabels(f, n).labels;
      std::vector<int> len(static_cast<size_t>(n), 0);
      bool ok = labels.size() == static_cast<size_t>(t) && std::is_sorted(labels.begin(), labels.end());
      for (int l : labels) ok = ok && l >= 0 && l < n && ++len[static_cast<size_t>(l)];
      const auto [lo, hi] = std::minmax_element(len.begin(), len.end());
      ok = ok && *lo >= 1 && *hi - *lo <= 1;
      bad_utt += !ok;
      ++checked;
    }
  }
  return {bad_stream == 0 && bad_utt == 0,
          Fmt("sTCL mismatches %.0f/1000; uTCL violations %.0f/%.0f (N=2..30, T=N..500)", bad_stream, bad_utt,
              checked)};
}

// ---------------------------------------------------------------- 7
Outcome PcaProperties() {
  Rng rng(707);
  double worst_ortho = 0.0, worst_recon = 0.0;
  auto ortho = [](const PcaModel &m) {
    const Matrix g = m.basis * m.basis.transpose();
    return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  };
  worst_ortho = std::max(worst_ortho, ortho(FitPca(Gaussians(2000, 1024, rng), 57)));
  for (int trial = 0; trial < 5; ++trial) {
    const int dim = 20 + 10 * trial, out = 3 + 2 * trial;
    const Matrix data = Gaussians(400, out, rng) * Gaussians(out, dim, rng) * 3.0 +
                        Matrix::Constant(400, dim, rng.Gaussian());
    const PcaModel m = FitPca(data, out);
    worst_ortho = std::max(worst_ortho, ortho(m));
    const Matrix recon = (Project(m, data) * m.basis).rowwise() + m.mean.transpose();
    worst_recon = std::max(worst_recon, (recon - data).cwiseAbs().maxCoeff());
  }
  return {worst_ortho <= 1e-8 && worst_recon <= 1e-8,
          Fmt("max |B B^T - I| %.3g (<= 1e-8); max reconstruction error %.3g (<= 1e-8)", worst_ortho, worst_recon)};
}

// ---------------------------------------------------------------- 8, 9
struct RunResult {
  EvaluationReport report;
  double seconds = 0.0;
};

RunResult RunDeskExperiment(const fs::path &corpus, const fs::path &out,
                            const std::function<void(ExperimentConfig &)> &tweak = {}) {
  PipelineContext ctx;
  ctx.manifest = ReadManifest(corpus / "manifest.tsv");
  ctx.config = ParseConfig(std::string(kSyntheticCorpusConfig), corpus);
  if (tweak) tweak(ctx.config);
  ctx.out_dir = out;
  ctx.deterministic = true;
  fs::remove_all(out);
  const auto start = Clock::now();
  RunResult r;
  r.report = RunAll(ctx);
  r.seconds = Seconds(start);
  return r;
}

double TypeEer(const EvaluationReport &r, TrialType type) {
  for (const auto &m : r.per_type)
    if (m.type == type) return m.eer;
  return 1.0;
}

std::vector<fs::path> Artifacts(const fs::path &root) {
  std::vector<fs::path> files;
  for (const auto &e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root);
    const std::string top = rel.begin()->string();
    const std::string ext = rel.extension().string();
    if (ext == ".tcln" || ext == ".tclp" || ext == ".tclg" || top == "report" || top == "scores")
      files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

int main(int argc, char **argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "tclsv_acceptance";
  fs::create_directories(work);
  SetWarningSink([](std::string_view) {});

  int failures = 0;
  auto report = [&](int id, const char *name, const std::function<Outcome()> &fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "gradient correctness", GradientCheck);
  report(2, "EM monotonicity", EmMonotonicity);
  report(3, "MAP limits", MapLimits);
  report(4, "LLR identity", LlrIdentity);
  report(5, "EER/minDCF oracle equivalence", MetricOracles);
  report(6, "labeling oracles", LabelingOracles);
  report(7, "PCA properties", PcaProperties);

  const fs::path corpus = work / "corpus";
  bool corpus_ok = true;
  try {
    fs::remove_all(corpus);
    WriteSyntheticCorpus(corpus, SyntheticCorpusOptions{});
  } catch (const std::exception &e) {
    std::printf("corpus generation failed: %s\n", e.what());
    corpus_ok = false;
  }

  RunResult first;
  report(8, "end-to-end synthetic run", [&]() -> Outcome {
    if (!corpus_ok) return {false, "no corpus"};
    first = RunDeskExperiment(corpus, work / "run_a");
    const double eer = TypeEer(first.report, TrialType::kImpostorCorrect);
    return {first.seconds < 600.0 && eer < 0.40,
            Fmt("uTCL N=10: impostor-correct EER %.2f%% (< 40%%), average EER %.2f%%, %.1f s (< 600 s)", 100 * eer,
                100 * first.report.average.eer, first.seconds)};
  });

  if (corpus_ok) {
    try {
      const RunResult stcl = RunDeskExperiment(corpus, work / "run_stcl", [](ExperimentConfig &c) {
        c.tcl.mode = TclMode::kStream;
        c.tcl.num_classes = 15;
        c.tcl.frames_per_segment = 6;
      });
      std::printf("INFO sTCL N=15 vs uTCL N=10 (reported, not asserted): average EER %.2f%% vs %.2f%%, "
                  "impostor-correct EER %.2f%% vs %.2f%%, average minDCFx100 %.3f vs %.3f\n",
                  100 * stcl.report.average.eer, 100 * first.report.average.eer,
                  100 * TypeEer(stcl.report, TrialType::kImpostorCorrect),
                  100 * TypeEer(first.report, TrialType::kImpostorCorrect), 100 * stcl.report.average.min_dcf,
                  100 * first.report.average.min_dcf);
    } catch (const std::exception &e) {
      std::printf("INFO sTCL comparison run failed: %s\n", e.what());
    }
  }

  report(9, "determinism", [&]() -> Outcome {
    if (!corpus_ok) return {false, "no corpus"};
    RunDeskExperiment(corpus, work / "run_b");
    const auto a = Artifacts(work / "run_a"), b = Artifacts(work / "run_b");
    if (a != b || a.empty()) return {false, "artifact sets differ"};
    size_t differing = 0;
    for (const auto &rel : a)
      differing += ReadFileBytes(work / "run_a" / rel) != ReadFileBytes(work / "run_b" / rel);
    return {differing == 0, Fmt("%.0f model/report files compared, %.0f differ", static_cast<double>(a.size()),
                                static_cast<double>(differing))};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
