// src/config.cc

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

#include "tclsv/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tclsv/error.h"

namespace tclsv {

using nlohmann::json;

namespace {

[[noreturn]] void Bad(const std::string &what) {
  throw Error(ErrorCode::kInvalidArgument, "config: " + what);
}

// Reads optional members of one JSON object and rejects unknown keys.
class Section {
 public:
  Section(const json &node, std::string name) : node_(node), name_(std::move(name)) {
    if (!node_.is_object()) Bad(name_ + " must be an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto &item : node_.items())
      if (!used_.count(item.key())) Bad("unknown key " + name_ + "." + item.key());
  }

  template <typename T>
  void Get(const std::string &key, T *out) {
    used_.insert(key);
    if (!node_.contains(key)) return;
    try {
      *out = node_.at(key).get<T>();
    } catch (const json::exception &e) {
      Bad(name_ + "." + key + ": " + e.what());
    }
  }

  const json *Child(const std::string &key) {
    used_.insert(key);
    return node_.contains(key) ? &node_.at(key) : nullptr;
  }

 private:
  const json &node_;
  std::string name_;
  std::set<std::string> used_;
};

std::string ModeName(TclMode m) { return m == TclMode::kStream ? "stream" : "utterance"; }

std::string TargetsName(DnnTargets t) {
  switch (t) {
    case DnnTargets::kTcl: return "tcl";
    case DnnTargets::kSpeaker: return "speaker";
    case DnnTargets::kSpeakerPhrase: return "speaker+phrase";
  }
  return "?";
}

std::string FeatureName(BackendFeature f) { return f == BackendFeature::kMfcc ? "mfcc" : "bn"; }
std::string KeyName(ModelKey k) { return k == ModelKey::kSpeaker ? "speaker" : "speaker-phrase"; }

}  // namespace

void ExperimentConfig::SetSeed(uint64_t s) {
  seed = s;
  tcl.shuffle_seed = s;
  dnn.train.shuffle_seed = s + 2;
}

void ExperimentConfig::Validate() const {
  frontend.Validate();
  tcl.Validate();
  if (dnn.context_left < 0 || dnn.context_right < 0) Bad("dnn context must be >= 0");
  if (dnn.hidden_layers.empty()) Bad("dnn.hidden_layers must not be empty");
  for (int w : dnn.hidden_layers)
    if (w <= 0) Bad("dnn.hidden_layers entries must be positive");
  const size_t heads = dnn.targets == DnnTargets::kSpeakerPhrase ? 2 : 1;
  dnn.train.Validate(heads);
  ParseLayerName(bottleneck.layer, static_cast<int>(dnn.hidden_layers.size()));
  if (bottleneck.pca_dim < 1) Bad("bottleneck.pca_dim must be positive");
  if (backend.num_components < 1) Bad("backend.num_components must be positive");
  if (backend.em_iterations < 0) Bad("backend.em_iterations must be >= 0");
  backend.map.Validate();
  evaluation.dcf.Validate();
  if (workers < 0) Bad("workers must be >= 0");
}

ExperimentConfig ParseConfig(const std::string &json_text, const std::filesystem::path &base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error &e) {
    Bad(std::string("parse error: ") + e.what());
  }

  ExperimentConfig cfg;
  {
    Section top(root, "config");
    uint64_t seed = 0;
    top.Get("seed", &seed);
    top.Get("workers", &cfg.workers);

    if (const json *node = top.Child("frontend")) {
      Section s(*node, "frontend");
      FrontendConfig &f = cfg.frontend;
      s.Get("frame_shift_ms", &f.frame_shift_ms);
      s.Get("frame_length_ms", &f.frame_length_ms);
      s.Get("num_static_ceps", &f.num_static_ceps);
      s.Get("num_mel_filters", &f.num_mel_filters);
      s.Get("preemphasis_coeff", &f.preemphasis_coeff);
      s.Get("rasta_enabled", &f.rasta_enabled);
      s.Get("vad_threshold_db", &f.vad_threshold_db);
      s.Get("delta_window", &f.delta_window);
    }
    if (const json *node = top.Child("tcl")) {
      Section s(*node, "tcl");
      std::string mode = ModeName(cfg.tcl.mode);
      s.Get("mode", &mode);
      if (mode == "stream") cfg.tcl.mode = TclMode::kStream;
      else if (mode == "utterance") cfg.tcl.mode = TclMode::kUtterance;
      else Bad("tcl.mode must be 'stream' or 'utterance'");
      s.Get("num_classes", &cfg.tcl.num_classes);
      s.Get("frames_per_segment", &cfg.tcl.frames_per_segment);
    }
    if (const json *node = top.Child("dnn")) {
      Section s(*node, "dnn");
      std::string targets = TargetsName(cfg.dnn.targets);
      s.Get("targets", &targets);
      if (targets == "tcl") cfg.dnn.targets = DnnTargets::kTcl;
      else if (targets == "speaker") cfg.dnn.targets = DnnTargets::kSpeaker;
      else if (targets == "speaker+phrase") cfg.dnn.targets = DnnTargets::kSpeakerPhrase;
      else Bad("dnn.targets must be 'tcl', 'speaker' or 'speaker+phrase'");
      s.Get("hidden_layers", &cfg.dnn.hidden_layers);
      s.Get("context_left", &cfg.dnn.context_left);
      s.Get("context_right", &cfg.dnn.context_right);
      s.Get("learning_rate", &cfg.dnn.train.learning_rate);
      s.Get("epochs", &cfg.dnn.train.epochs);
      s.Get("minibatch_size", &cfg.dnn.train.minibatch_size);
      s.Get("task_weights", &cfg.dnn.train.task_weights);
    }
    if (const json *node = top.Child("bottleneck")) {
      Section s(*node, "bottleneck");
      s.Get("layer", &cfg.bottleneck.layer);
      s.Get("pca_dim", &cfg.bottleneck.pca_dim);
      std::string split(SplitName(cfg.bottleneck.pca_split));
      s.Get("pca_split", &split);
      try {
        cfg.bottleneck.pca_split = ParseSplit(split);
      } catch (const Error &) {
        Bad("bottleneck.pca_split: unknown split '" + split + "'");
      }
    }
    if (const json *node = top.Child("backend")) {
      Section s(*node, "backend");
      std::string feature = FeatureName(cfg.backend.feature);
      s.Get("feature", &feature);
      if (feature == "bn") cfg.backend.feature = BackendFeature::kBottleneck;
      else if (feature == "mfcc") cfg.backend.feature = BackendFeature::kMfcc;
      else Bad("backend.feature must be 'bn' or 'mfcc'");
      s.Get("num_components", &cfg.backend.num_components);
      s.Get("em_iterations", &cfg.backend.em_iterations);
      std::string key = KeyName(cfg.backend.model_key);
      s.Get("model_key", &key);
      if (key == "speaker-phrase") cfg.backend.model_key = ModelKey::kSpeakerPhrase;
      else if (key == "speaker") cfg.backend.model_key = ModelKey::kSpeaker;
      else Bad("backend.model_key must be 'speaker-phrase' or 'speaker'");
      s.Get("relevance_factor", &cfg.backend.map.relevance_factor);
      s.Get("map_iterations", &cfg.backend.map.iterations);
    }
    if (const json *node = top.Child("evaluation")) {
      Section s(*node, "evaluation");
      s.Get("trials", &cfg.evaluation.trials);
      s.Get("p_target", &cfg.evaluation.dcf.p_target);
      s.Get("cost_miss", &cfg.evaluation.dcf.cost_miss);
      s.Get("cost_fa", &cfg.evaluation.dcf.cost_fa);
    }
    cfg.SetSeed(seed);
  }
  if (!cfg.evaluation.trials.empty()) {
    std::filesystem::path p = cfg.evaluation.trials;
    cfg.evaluation.trials_path = p.is_relative() ? base_dir / p : p;
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path.parent_path());
}

std::string SerializeConfig(const ExperimentConfig &c) {
  json root;
  root["seed"] = c.seed;
  root["workers"] = c.workers;
  root["frontend"] = {
      {"frame_shift_ms", c.frontend.frame_shift_ms},
      {"frame_length_ms", c.frontend.frame_length_ms},
      {"num_static_ceps", c.frontend.num_static_ceps},
      {"num_mel_filters", c.frontend.num_mel_filters},
      {"preemphasis_coeff", c.frontend.preemphasis_coeff},
      {"rasta_enabled", c.frontend.rasta_enabled},
      {"vad_threshold_db", c.frontend.vad_threshold_db},
      {"delta_window", c.frontend.delta_window},
  };
  root["tcl"] = {
      {"mode", ModeName(c.tcl.mode)},
      {"num_classes", c.tcl.num_classes},
      {"frames_per_segment", c.tcl.frames_per_segment},
  };
  root["dnn"] = {
      {"targets", TargetsName(c.dnn.targets)},
      {"hidden_layers", c.dnn.hidden_layers},
      {"context_left", c.dnn.context_left},
      {"context_right", c.dnn.context_right},
      {"learning_rate", c.dnn.train.learning_rate},
      {"epochs", c.dnn.train.epochs},
      {"minibatch_size", c.dnn.train.minibatch_size},
      {"task_weights", c.dnn.train.task_weights},
  };
  root["bottleneck"] = {
      {"layer", c.bottleneck.layer},
      {"pca_dim", c.bottleneck.pca_dim},
      {"pca_split", std::string(SplitName(c.bottleneck.pca_split))},
  };
  root["backend"] = {
      {"feature", FeatureName(c.backend.feature)},
      {"num_components", c.backend.num_components},
      {"em_iterations", c.backend.em_iterations},
      {"model_key", KeyName(c.backend.model_key)},
      {"relevance_factor", c.backend.map.relevance_factor},
      {"map_iterations", c.backend.map.iterations},
  };
  root["evaluation"] = {
      {"trials", c.evaluation.trials},
      {"p_target", c.evaluation.dcf.p_target},
      {"cost_miss", c.evaluation.dcf.cost_miss},
      {"cost_fa", c.evaluation.dcf.cost_fa},
  };
  return root.dump(2) + "\n";
}

}  // namespace tclsv
