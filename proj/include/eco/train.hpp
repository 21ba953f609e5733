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

#ifndef ECO_TRAIN_H_
#define ECO_TRAIN_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "eco/augment.hpp"
#include "eco/model.hpp"

namespace eco {

// Adam with global-norm clipping applied before the update.
struct AdamState {
  std::map<std::string, Mat> m;
  std::map<std::string, Mat> v;
  long long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(ModelParams& params, const std::map<std::string, Mat>& grads,
               AdamState& state, double lr, double clip_norm);

struct EpochStats {
  int epoch = 0;
  double avg_turn_loss = 0.0;
  int turns = 0;
  int labeled_turns = 0;
};

struct EvalPoint {
  int epoch = 0;
  double dev_score = 0.0;
  std::string checkpoint_path;
};

struct TrainResult {
  ModelParams final_params;
  ModelParams best_params;   // by dev score; final params when never evaluated
  int best_epoch = 0;
  double best_dev_score = 0.0;
  double initial_avg_loss = 0.0;  // untrained model on the first epoch's data
  double final_avg_loss = 0.0;
  std::vector<EpochStats> epochs;
  std::vector<EvalPoint> evals;

  nlohmann::json log_json() const;
};

// Called at evaluation epochs; returns the model-selection score (higher
// is better).
using DevEvaluator = std::function<double(const ModelParams& params, int epoch)>;

// Trains on d_tr plus a fresh augmentation round per epoch (templates are
// resampled with an epoch-derived seed, so each epoch sees different
// entity assignments). data_mode in cfg restricts the pool to one side.
// Checkpoints are written to ckpt_dir at evaluation epochs when both
// ckpt_dir and dev_eval are given; the best checkpoint is kept by score,
// earliest epoch winning ties.
TrainResult train(const std::vector<Dialog>& d_tr, const std::vector<Template>& templates,
                  const KnowledgeBase& kb, const EntityTrie& trie, const Vocabulary& vocab,
                  const ModelConfig& cfg, const std::string& ckpt_dir = "",
                  const DevEvaluator& dev_eval = nullptr, std::ostream* log = nullptr);

}  // namespace eco

#endif  // ECO_TRAIN_H_
