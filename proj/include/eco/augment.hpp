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

#ifndef ECO_AUGMENT_H_
#define ECO_AUGMENT_H_

#include <optional>
#include <vector>

#include "eco/dialog.hpp"
#include "eco/kb.hpp"

namespace eco {

struct AugmentStats {
  int dialogs_in = 0;
  int templates_out = 0;
  int skipped_no_spans = 0;        // nothing annotated, nothing to abstract
  int skipped_no_entity = 0;       // annotated values agree with no single entity
  int templates_in = 0;
  int dialogs_out = 0;
  int skipped_empty_goal_match = 0;  // no entity satisfies the template goal
  int skipped_missing_value = 0;     // sampled entity lacks a needed attribute

  nlohmann::json to_json() const;
};

// Abstracts one dialog into a template: every annotated value becomes its
// attribute placeholder. Returns nothing when the dialog has no spans or
// its annotated values do not all belong to a single KB entity (the lowest
// entity id wins when several qualify).
std::optional<Template> delex(const Dialog& d, const KnowledgeBase& kb,
                              AugmentStats* stats = nullptr);

std::vector<Template> delex_corpus(const std::vector<Dialog>& dialogs,
                                   const KnowledgeBase& kb,
                                   AugmentStats* stats = nullptr);

// Fills a template from one entity: placeholders take the entity's values,
// spans are recomputed, turns that contain spans get the entity as gold
// label, and goal constraints are rewritten to the entity's values so the
// rewritten dialog still agrees with its own goal. Returns nothing when
// the entity has no value for a matched attribute.
std::optional<Dialog> relex(const Template& t, const Entity& e, const KnowledgeBase& kb);

// For each template: collect the entities matching its goal, sample up to
// p of them without replacement, and relex. Entity sampling uses one
// derived stream per template, so the output is independent of template
// order changes elsewhere.
std::vector<Dialog> augment_batch(const std::vector<Template>& templates,
                                  const KnowledgeBase& kb, int p, uint64_t seed,
                                  AugmentStats* stats = nullptr);

// d_tr stays as given; d_au is one augmentation round over the templates
// extracted from d_tr.
TrainingSets build_training_sets(const std::vector<Dialog>& d_tr, const KnowledgeBase& kb,
                                 int p, uint64_t seed, AugmentStats* stats = nullptr);

}  // namespace eco

#endif  // ECO_AUGMENT_H_
