// Copyright 2026 The ECO Authors. All Rights Reserved.
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

#ifndef ECO_PIPELINE_H_
#define ECO_PIPELINE_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "eco/augment.hpp"
#include "eco/generate.hpp"
#include "eco/metrics.hpp"
#include "eco/synth.hpp"
#include "eco/train.hpp"

namespace eco {

struct ExperimentPaths {
  std::string kb;
  std::string train;
  std::string dev;
  std::string test;
  std::string out_dir = "out";
};

struct ExperimentConfig {
  ExperimentPaths paths;
  ModelConfig model;
  DecodeConfig decode;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load_file(const std::string& path);

  // The ECO_SEED environment variable, when set, overrides model.seed.
  void apply_env_seed();
  // Translates an ablation name into config switches. Known names:
  // full, no_trie, no_logit_concat, logit_eval, au_only, tr_only.
  void apply_variant(const std::string& variant);
};

// Everything an experiment consumes, loaded once and shared across
// variants: corpus, vocabulary (from KB plus training text), trie, and
// the templates extracted from the training dialogs.
struct LoadedData {
  KnowledgeBase kb;
  std::vector<Dialog> train;
  std::vector<Dialog> dev;
  std::vector<Dialog> test;
  Vocabulary vocab;
  EntityTrie trie;
  std::vector<Template> templates;
  AugmentStats delex_stats;
};

Vocabulary vocab_from_dialogs(const KnowledgeBase& kb, const std::vector<Dialog>& dialogs);
LoadedData load_experiment_data(const ExperimentPaths& paths);
LoadedData prepare_experiment_data(const KnowledgeBase& kb, std::vector<Dialog> train,
                                   std::vector<Dialog> dev, std::vector<Dialog> test);

struct RunOutcome {
  TrainResult training;
  std::vector<DialogPrediction> predictions;  // test split, best checkpoint
  MetricsReport report;
};

// Train, generate on the test split with the best checkpoint, evaluate.
// Writes checkpoints to ckpt_dir when non-empty.
RunOutcome run_experiment(const LoadedData& data, const ModelConfig& mcfg,
                          const DecodeConfig& dcfg, const std::string& ckpt_dir = "",
                          std::ostream* log = nullptr);

// File-level end-to-end run: loads inputs, runs the experiment, and writes
// dfn.jsonl, augment_report.json, trie_summary.json, checkpoints,
// training_log.json, preds.jsonl, report.json, and summary.json under
// paths.out_dir. Returns the summary.
nlohmann::json run_pipeline(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct AblationRow {
  std::string variant;
  std::vector<double> bleu, inform, success, score, f1, consistency, validity;

  nlohmann::json to_json() const;  // mean and sample std per metric
};

// Runs each variant across n_seeds seeds (model.seed, model.seed+1, ...)
// on shared data. Rows keep per-seed values; the JSON carries mean/std.
std::vector<AblationRow> run_ablation(const LoadedData& data, const ExperimentConfig& base,
                                      const std::vector<std::string>& variants, int n_seeds,
                                      std::ostream* log = nullptr);

std::string format_ablation_table(const std::vector<AblationRow>& rows);
std::string format_report_table(const MetricsReport& report);

}  // namespace eco

#endif  // ECO_PIPELINE_H_
