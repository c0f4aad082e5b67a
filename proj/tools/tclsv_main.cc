// tools/tclsv_main.cc

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

// Command-line driver for the feature-extraction / verification pipeline.
//
//   tclsv <subcommand> --manifest <path> --config <path> --out <dir>
//         [--seed N] [--deterministic]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 internal error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tclsv/config.h"
#include "tclsv/error.h"
#include "tclsv/manifest.h"
#include "tclsv/pipeline.h"
#include "tclsv/synthetic_corpus.h"
#include "tclsv/binary_io.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct Options {
  std::string manifest;
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  bool deterministic = false;
};

void AddPipelineOptions(CLI::App *cmd, Options *opts) {
  cmd->add_option("--manifest", opts->manifest, "Corpus manifest (TSV with header)")->required();
  cmd->add_option("--config", opts->config, "Experiment configuration (JSON)");
  cmd->add_option("--out", opts->out, "Experiment output directory")->required();
  cmd->add_option("--seed", opts->seed, "Override the master seed");
  cmd->add_flag("--deterministic", opts->deterministic,
                "Single worker, fixed processing order");
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"tclsv: time-contrastive bottleneck features and GMM-UBM speaker verification"};
  app.require_subcommand(1);
  Options opts;

  const char *stages[][2] = {
      {"extract-features", "MFCC archives for every manifest entry"},
      {"make-labels", "DNN training labels (TCL segments or speaker/phrase ids)"},
      {"train-dnn", "Train the DNN on the dnn-train split"},
      {"extract-bn", "Fit PCA and write bottleneck features"},
      {"train-ubm", "Train the GMM-UBM on the ubm-train split"},
      {"enroll", "MAP-adapt one model per enrollment key"},
      {"score", "Score the trial list"},
      {"evaluate", "EER / minDCF report per non-target type"},
      {"run-all", "Run every stage in order"},
  };
  for (const auto &s : stages) AddPipelineOptions(app.add_subcommand(s[0], s[1]), &opts);

  std::string synth_out;
  uint64_t synth_seed = tclsv::SyntheticCorpusOptions{}.seed;
  CLI::App *synth = app.add_subcommand("synth-corpus", "Write the bundled synthetic corpus");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Corpus seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  CLI::App *cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    if (name == "synth-corpus") {
      tclsv::SyntheticCorpusOptions so;
      so.seed = synth_seed;
      const auto corpus = tclsv::WriteSyntheticCorpus(synth_out, so);
      tclsv::WriteFileAtomic(std::filesystem::path(synth_out) / "config.json",
                             tclsv::kSyntheticCorpusConfig);
      std::cout << "wrote " << corpus.manifest.entries.size() << " utterances and "
                << corpus.trials.size() << " trials to " << synth_out << "\n";
      return kExitOk;
    }

    tclsv::PipelineContext ctx;
    try {
      ctx.config = opts.config.empty() ? tclsv::ParseConfig("{}", ".") : tclsv::LoadConfig(opts.config);
      if (opts.seed) ctx.config.SetSeed(*opts.seed);
    } catch (const tclsv::Error &e) {
      std::cerr << "tclsv " << name << ": " << e.what() << "\n";
      return kExitUsage;
    }
    ctx.manifest = tclsv::ReadManifest(opts.manifest);
    ctx.out_dir = opts.out;
    ctx.deterministic = opts.deterministic;

    if (name == "extract-features") {
      const auto r = tclsv::RunExtractFeatures(ctx);
      std::cout << "extract-features: " << r.num_written << " archives, " << r.failures.size()
                << " failures\n";
    } else if (name == "make-labels") {
      tclsv::RunMakeLabels(ctx);
    } else if (name == "train-dnn") {
      tclsv::RunTrainDnn(ctx);
    } else if (name == "extract-bn") {
      tclsv::RunExtractBottleneck(ctx);
    } else if (name == "train-ubm") {
      tclsv::RunTrainUbm(ctx);
    } else if (name == "enroll") {
      tclsv::RunEnroll(ctx);
    } else if (name == "score") {
      tclsv::RunScore(ctx);
    } else if (name == "evaluate") {
      std::cout << tclsv::FormatReportText(tclsv::RunEvaluate(ctx));
    } else if (name == "run-all") {
      std::cout << tclsv::FormatReportText(tclsv::RunAll(ctx));
    }
    return kExitOk;
  } catch (const tclsv::Error &e) {
    std::cerr << "tclsv " << name << ": " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception &e) {
    std::cerr << "tclsv " << name << ": internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
