// src/pipeline.cc

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

#include "tclsv/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tclsv/audio_frontend.h"
#include "tclsv/binary_io.h"
#include "tclsv/bottleneck.h"
#include "tclsv/error.h"
#include "tclsv/feature_io.h"
#include "tclsv/gmm.h"
#include "tclsv/neural_net.h"
#include "tclsv/tcl_labeling.h"
#include "tclsv/wav_io.h"

namespace tclsv {

namespace fs = std::filesystem;

namespace {

std::string Exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

fs::path MfccPath(const PipelineContext &ctx, const std::string &utt) {
  return ctx.out_dir / "features" / (utt + ".tclf");
}

fs::path BnPath(const PipelineContext &ctx, const std::string &utt) {
  return ctx.out_dir / "bn" / "features" / (utt + ".tclf");
}

fs::path BackendFeaturePath(const PipelineContext &ctx, const std::string &utt) {
  return ctx.config.backend.feature == BackendFeature::kMfcc ? MfccPath(ctx, utt) : BnPath(ctx, utt);
}

const char *BackendProducer(const PipelineContext &ctx) {
  return ctx.config.backend.feature == BackendFeature::kMfcc ? "extract-features" : "extract-bn";
}

void Require(const fs::path &path, const std::string &stage, const std::string &producer) {
  if (!fs::exists(path))
    throw Error(ErrorCode::kMissingArtifact,
                stage + ": missing " + path.string() + " (produced by " + producer + ")");
}

Matrix LoadFeatures(const fs::path &path, const std::string &stage, const std::string &producer) {
  Require(path, stage, producer);
  return ReadFeatureArchive(path);
}

void WriteStageConfig(const PipelineContext &ctx, const std::string &dir) {
  WriteFileAtomic(ctx.out_dir / dir / "config.json", SerializeConfig(ctx.config));
}

void Prepare(const PipelineContext &ctx) {
  ctx.config.Validate();
  LintPhraseSplit(ctx.manifest);
}

std::vector<std::string> HeadNames(DnnTargets targets) {
  switch (targets) {
    case DnnTargets::kTcl: return {"tcl"};
    case DnnTargets::kSpeaker: return {"speaker"};
    case DnnTargets::kSpeakerPhrase: return {"speaker", "phrase"};
  }
  return {};
}

std::vector<ManifestEntry> RequireSplit(const PipelineContext &ctx, Split split,
                                        const std::string &stage) {
  auto entries = ctx.manifest.Select(split);
  if (entries.empty())
    throw Error(ErrorCode::kMissingArtifact,
                stage + ": manifest has no " + std::string(SplitName(split)) + " entries");
  return entries;
}

// Vertically stacks matrices of equal width.
Matrix Pool(const std::vector<Matrix> &parts) {
  Eigen::Index rows = 0;
  for (const auto &p : parts) rows += p.rows();
  Matrix out(rows, parts.empty() ? 0 : parts.front().cols());
  Eigen::Index r = 0;
  for (const auto &p : parts) {
    if (p.cols() != out.cols()) throw Error(ErrorCode::kDimensionMismatch, "feature dims differ");
    out.middleRows(r, p.rows()) = p;
    r += p.rows();
  }
  return out;
}

}  // namespace

std::string ModelIdFor(const ManifestEntry &entry, ModelKey key) {
  if (key == ModelKey::kSpeaker || entry.phrase_id.empty()) return entry.speaker_id;
  return entry.speaker_id + "_" + entry.phrase_id;
}

ExtractFeaturesResult RunExtractFeatures(const PipelineContext &ctx) {
  Prepare(ctx);
  const auto &entries = ctx.manifest.entries;
  ExtractFeaturesResult result;
  fs::create_directories(ctx.out_dir / "features");
  if (entries.empty()) Warn("extract-features: manifest is empty, nothing to do");

  unsigned workers = 1;
  if (!ctx.deterministic) {
    workers = ctx.config.workers > 0 ? static_cast<unsigned>(ctx.config.workers)
                                     : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<size_t>(entries.size(), 1)));
  }

  std::atomic<size_t> next{0};
  std::atomic<size_t> written{0};
  std::mutex mu;
  auto work = [&] {
    for (size_t i = next++; i < entries.size(); i = next++) {
      const ManifestEntry &e = entries[i];
      try {
        const AudioSignal signal = ReadWav(e.wav_path);
        const FeatureMatrix feats = ExtractMfccFeatures(signal, ctx.config.frontend, e.utterance_id);
        WriteFeatureArchive(MfccPath(ctx, e.utterance_id), feats.frames);
        ++written;
      } catch (const std::exception &ex) {
        std::lock_guard<std::mutex> lock(mu);
        result.failures.push_back({e.utterance_id, ex.what()});
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  result.num_written = written;
  std::sort(result.failures.begin(), result.failures.end(),
            [](const auto &a, const auto &b) { return a.utterance_id < b.utterance_id; });

  std::ostringstream os;
  for (const auto &f : result.failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::replace(msg.begin(), msg.end(), '\t', ' ');
    os << f.utterance_id << '\t' << msg << '\n';
  }
  WriteFileAtomic(ctx.out_dir / "features" / "failures.tsv", os.str());
  WriteStageConfig(ctx, "features");
  for (const auto &f : result.failures) Warn("extract-features: " + f.utterance_id + ": " + f.message);
  return result;
}

void RunMakeLabels(const PipelineContext &ctx) {
  Prepare(ctx);
  const std::string stage = "make-labels";
  const auto entries = RequireSplit(ctx, Split::kDnnTrain, stage);
  std::vector<FeatureMatrix> utts;
  std::vector<std::string> ids;
  for (const auto &e : entries) {
    FeatureMatrix fm;
    fm.utterance_id = e.utterance_id;
    fm.frames = LoadFeatures(MfccPath(ctx, e.utterance_id), stage, "extract-features");
    utts.push_back(std::move(fm));
    ids.push_back(e.utterance_id);
  }

  const fs::path dir = ctx.out_dir / "labels";
  std::ostringstream heads;
  if (ctx.config.dnn.targets == DnnTargets::kTcl) {
    const LabeledFrames labeled = AssignTclLabels(utts, ctx.config.tcl);
    WriteLabelArchive(dir / "tcl.txt", ids, labeled.per_utterance_labels);
    const auto counts = SummarizeLabelDistribution(labeled, ctx.config.tcl.num_classes);
    std::ostringstream dist;
    for (size_t c = 0; c < counts.size(); ++c) dist << c << '\t' << counts[c] << '\n';
    WriteFileAtomic(dir / "tcl.distribution.tsv", dist.str());
    heads << "tcl\t" << ctx.config.tcl.num_classes << '\n';
  } else {
    auto supervised = [&](const std::string &head, auto key_of) {
      std::set<std::string> classes;
      for (const auto &e : entries) {
        const std::string key = key_of(e);
        if (key.empty())
          throw Error(ErrorCode::kInvalidArgument,
                      stage + ": utterance " + e.utterance_id + " has no " + head + " id");
        classes.insert(key);
      }
      if (classes.size() < 2)
        throw Error(ErrorCode::kInvalidArgument, stage + ": need >= 2 " + head + " classes");
      const std::vector<std::string> sorted(classes.begin(), classes.end());
      std::vector<std::vector<int>> labels;
      for (size_t i = 0; i < entries.size(); ++i) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), key_of(entries[i]));
        labels.emplace_back(static_cast<size_t>(utts[i].NumFrames()),
                            static_cast<int>(it - sorted.begin()));
      }
      WriteLabelArchive(dir / (head + ".txt"), ids, labels);
      std::ostringstream cls;
      for (const auto &c : sorted) cls << c << '\n';
      WriteFileAtomic(dir / (head + ".classes"), cls.str());
      heads << head << '\t' << sorted.size() << '\n';
    };
    supervised("speaker", [](const ManifestEntry &e) { return e.speaker_id; });
    if (ctx.config.dnn.targets == DnnTargets::kSpeakerPhrase)
      supervised("phrase", [](const ManifestEntry &e) { return e.phrase_id; });
  }
  WriteFileAtomic(dir / "heads.tsv", heads.str());
  WriteStageConfig(ctx, "labels");
}

void RunTrainDnn(const PipelineContext &ctx) {
  Prepare(ctx);
  const std::string stage = "train-dnn";
  const auto entries = RequireSplit(ctx, Split::kDnnTrain, stage);
  const fs::path label_dir = ctx.out_dir / "labels";

  NetworkArch arch;
  arch.hidden_layers = ctx.config.dnn.hidden_layers;
  {
    const fs::path heads_path = label_dir / "heads.tsv";
    Require(heads_path, stage, "make-labels");
    std::ifstream in(heads_path);
    std::string name;
    int classes;
    while (in >> name >> classes) arch.heads.push_back({name, classes});
  }
  const auto expected = HeadNames(ctx.config.dnn.targets);
  if (arch.heads.size() != expected.size())
    throw Error(ErrorCode::kFormat, stage + ": labels/heads.tsv does not match dnn.targets");
  for (size_t h = 0; h < expected.size(); ++h)
    if (arch.heads[h].name != expected[h])
      throw Error(ErrorCode::kFormat, stage + ": labels were made for head '" +
                                          arch.heads[h].name + "', config expects '" + expected[h] + "'");

  std::vector<LabelArchive> archives;
  for (const auto &head : arch.heads) {
    const fs::path p = label_dir / (head.name + ".txt");
    Require(p, stage, "make-labels");
    archives.push_back(ReadLabelArchive(p));
  }

  const int left = ctx.config.dnn.context_left, right = ctx.config.dnn.context_right;
  std::vector<Matrix> inputs;
  LabeledDataset dataset;
  dataset.labels.resize(arch.heads.size());
  for (const auto &e : entries) {
    const Matrix feats = LoadFeatures(MfccPath(ctx, e.utterance_id), stage, "extract-features");
    std::vector<const std::vector<int> *> lines;
    for (size_t h = 0; h < archives.size(); ++h) {
      const auto it = archives[h].find(e.utterance_id);
      if (it == archives[h].end())
        throw Error(ErrorCode::kMissingArtifact,
                    stage + ": no " + arch.heads[h].name + " labels for " + e.utterance_id);
      if (static_cast<Eigen::Index>(it->second.size()) != feats.rows())
        throw Error(ErrorCode::kDimensionMismatch,
                    stage + ": " + e.utterance_id + " has " + std::to_string(feats.rows()) +
                        " frames but " + std::to_string(it->second.size()) + " " +
                        arch.heads[h].name + " labels");
      lines.push_back(&it->second);
    }
    const Matrix stacked = StackContext(feats, left, right);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index t = 0; t < feats.rows(); ++t) {
      bool labeled = true;
      for (const auto *line : lines) labeled = labeled && (*line)[static_cast<size_t>(t)] != kNoLabel;
      if (!labeled) continue;
      keep.push_back(t);
      for (size_t h = 0; h < lines.size(); ++h)
        dataset.labels[h].push_back((*lines[h])[static_cast<size_t>(t)]);
    }
    Matrix rows(static_cast<Eigen::Index>(keep.size()), stacked.cols());
    for (size_t i = 0; i < keep.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = stacked.row(keep[i]);
    inputs.push_back(std::move(rows));
  }
  dataset.inputs = Pool(inputs);
  inputs.clear();
  if (dataset.NumExamples() == 0)
    throw Error(ErrorCode::kInsufficientFrames, stage + ": no labeled frames");
  arch.input_dim = static_cast<int>(dataset.inputs.cols());

  const TrainResult trained = Train(dataset, arch, ctx.config.DnnInitSeed(), ctx.config.dnn.train);
  WriteNetwork(ctx.out_dir / "dnn" / "model.tcln", trained.params);
  std::ostringstream trace;
  for (size_t i = 0; i < trained.loss_trace.size(); ++i)
    trace << i + 1 << '\t' << Exact(trained.loss_trace[i]) << '\n';
  WriteFileAtomic(ctx.out_dir / "dnn" / "loss_trace.txt", trace.str());
  WriteStageConfig(ctx, "dnn");
}

void RunExtractBottleneck(const PipelineContext &ctx) {
  Prepare(ctx);
  const std::string stage = "extract-bn";
  const fs::path model_path = ctx.out_dir / "dnn" / "model.tcln";
  Require(model_path, stage, "train-dnn");
  const NetworkParams net = ReadNetwork(model_path);
  const int layer = ParseLayerName(ctx.config.bottleneck.layer, net.arch.NumHidden());
  const int left = ctx.config.dnn.context_left, right = ctx.config.dnn.context_right;

  const auto pca_entries = RequireSplit(ctx, ctx.config.bottleneck.pca_split, stage);
  PcaAccumulator acc(net.arch.hidden_layers[static_cast<size_t>(layer - 1)]);
  for (const auto &e : pca_entries) {
    const Matrix feats = LoadFeatures(MfccPath(ctx, e.utterance_id), stage, "extract-features");
    acc.Accumulate(NormalizedDeepFeatures(net, feats, layer, left, right));
  }
  const PcaModel pca = acc.Fit(ctx.config.bottleneck.pca_dim);
  WritePca(ctx.out_dir / "bn" / "pca.tclp", pca);

  for (const auto &e : ctx.manifest.entries) {
    if (e.split == Split::kDnnTrain) continue;
    const Matrix feats = LoadFeatures(MfccPath(ctx, e.utterance_id), stage, "extract-features");
    WriteFeatureArchive(BnPath(ctx, e.utterance_id),
                        BottleneckFeatures(net, pca, feats, layer, left, right));
  }
  WriteStageConfig(ctx, "bn");
}

void RunTrainUbm(const PipelineContext &ctx) {
  Prepare(ctx);
  const std::string stage = "train-ubm";
  const auto entries = RequireSplit(ctx, Split::kUbmTrain, stage);
  std::vector<Matrix> parts;
  for (const auto &e : entries)
    parts.push_back(LoadFeatures(BackendFeaturePath(ctx, e.utterance_id), stage, BackendProducer(ctx)));
  const Matrix data = Pool(parts);
  parts.clear();
  const UbmTrainResult ubm = TrainUbm(data, ctx.config.backend.num_components,
                                      ctx.config.backend.em_iterations, ctx.config.UbmSeed());
  WriteGmm(ctx.out_dir / "ubm" / "ubm.tclg", ubm.model);
  std::ostringstream trace;
  for (size_t i = 0; i < ubm.log_likelihood_trace.size(); ++i)
    trace << i + 1 << '\t' << Exact(ubm.log_likelihood_trace[i] / static_cast<double>(data.rows()))
          << '\n';
  WriteFileAtomic(ctx.out_dir / "ubm" / "loglik_trace.txt", trace.str());
  WriteStageConfig(ctx, "ubm");
}

void RunEnroll(const PipelineContext &ctx) {
  Prepare(ctx);
  const std::string stage = "enroll";
  const auto entries = RequireSplit(ctx, Split::kEnroll, stage);
  const fs::path ubm_path = ctx.out_dir / "ubm" / "ubm.tclg";
  Require(ubm_path, stage, "train-ubm");
  const GmmModel ubm = ReadGmm(ubm_path);

  std::map<std::string, std::vector<std::string>> groups;
  for (const auto &e : entries) {
    const std::string id = ModelIdFor(e, ctx.config.backend.model_key);
    if (id.empty() || id.find('/') != std::string::npos)
      throw Error(ErrorCode::kInvalidArgument, stage + ": invalid model id for " + e.utterance_id);
    groups[id].push_back(e.utterance_id);
  }
  std::ostringstream index;
  for (const auto &[id, utts] : groups) {
    std::vector<Matrix> parts;
    for (const auto &u : utts)
      parts.push_back(LoadFeatures(BackendFeaturePath(ctx, u), stage, BackendProducer(ctx)));
    WriteGmm(ctx.out_dir / "models" / (id + ".tclg"), MapAdapt(ubm, Pool(parts), ctx.config.backend.map));
    index << id;
    for (const auto &u : utts) index << '\t' << u;
    index << '\n';
  }
  WriteFileAtomic(ctx.out_dir / "models" / "models.tsv", index.str());
  WriteStageConfig(ctx, "models");
}

void RunScore(const PipelineContext &ctx) {
  Prepare(ctx);
  const std::string stage = "score";
  if (ctx.config.evaluation.trials_path.empty())
    throw Error(ErrorCode::kInvalidArgument, stage + ": config has no evaluation.trials");
  const auto trials = ReadTrialList(ctx.config.evaluation.trials_path);
  const fs::path ubm_path = ctx.out_dir / "ubm" / "ubm.tclg";
  Require(ubm_path, stage, "train-ubm");
  const GmmModel ubm = ReadGmm(ubm_path);

  std::map<std::string, GmmModel> models;
  std::map<std::string, Matrix> tests;
  TrialScoreSet set;
  for (const auto &t : trials) {
    auto m = models.find(t.model_id);
    if (m == models.end()) {
      const fs::path p = ctx.out_dir / "models" / (t.model_id + ".tclg");
      if (t.model_id.find('/') != std::string::npos || !fs::exists(p))
        throw Error(ErrorCode::kMissingArtifact,
                    stage + ": model '" + t.model_id + "' not found (produced by enroll)");
      m = models.emplace(t.model_id, ReadGmm(p)).first;
    }
    auto u = tests.find(t.test_utterance_id);
    if (u == tests.end())
      u = tests.emplace(t.test_utterance_id,
                        LoadFeatures(BackendFeaturePath(ctx, t.test_utterance_id), stage,
                                     BackendProducer(ctx)))
              .first;
    set.trials.push_back(t);
    set.scores.push_back(ScoreLlr(m->second, ubm, u->second));
  }
  WriteScoreFile(ctx.out_dir / "scores" / "scores.txt", set);
  WriteStageConfig(ctx, "scores");
}

EvaluationReport RunEvaluate(const PipelineContext &ctx) {
  Prepare(ctx);
  const fs::path scores = ctx.out_dir / "scores" / "scores.txt";
  Require(scores, "evaluate", "score");
  const EvaluationReport report = Evaluate(ReadScoreFile(scores), ctx.config.evaluation.dcf);
  WriteFileAtomic(ctx.out_dir / "report" / "report.txt", FormatReportText(report));
  WriteFileAtomic(ctx.out_dir / "report" / "report.kv", FormatReportKeyValue(report));
  WriteStageConfig(ctx, "report");
  return report;
}

EvaluationReport RunAll(const PipelineContext &ctx) {
  RunExtractFeatures(ctx);
  if (ctx.config.backend.feature == BackendFeature::kBottleneck) {
    RunMakeLabels(ctx);
    RunTrainDnn(ctx);
    RunExtractBottleneck(ctx);
  }
  RunTrainUbm(ctx);
  RunEnroll(ctx);
  RunScore(ctx);
  return RunEvaluate(ctx);
}

}  // namespace tclsv
