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

#ifndef ECO_SYNTH_H_
#define ECO_SYNTH_H_

#include "eco/dialog.hpp"
#include "eco/kb.hpp"

namespace eco {

// Generator settings for the scripted corpus. Dialogs follow a fixed
// scenario (constrain, recommend, request, answer, optionally close) with
// surface variation, exact span annotations, and a per-dialog source
// entity, so every dialog is consistent with the knowledge base by
// construction and can be abstracted into a template.
struct SyntheticSpec {
  int entities = 20;
  int attributes = 4;  // including name; 3..7 supported
  int value_pool = 5;  // values drawn per non-name attribute
  int train_dialogs = 200;
  int dev_dialogs = 20;
  int test_dialogs = 20;
  uint64_t seed = 7;
  std::string domain = "eatery";
  // Probability that a non-name attribute of an entity is missing
  // (at most one missing attribute per entity).
  double none_rate = 0.1;

  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& j);
};

struct SyntheticCorpus {
  KnowledgeBase kb;
  std::vector<Dialog> train;
  std::vector<Dialog> dev;
  std::vector<Dialog> test;
};

SyntheticCorpus synth_corpus(const SyntheticSpec& spec);

// Writes kb.json, train.jsonl, dev.jsonl, test.jsonl, and goals.json
// (test-split goals) into out_dir.
void write_corpus(const SyntheticCorpus& corpus, const std::string& out_dir);

}  // namespace eco

#endif  // ECO_SYNTH_H_
