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

#ifndef ECO_METRICS_H_
#define ECO_METRICS_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eco/dialog.hpp"
#include "eco/kb.hpp"

namespace eco {

// One piece of entity information found in text: an attribute plus the
// surface value, canonicalized to a single string.
struct InfoPair {
  std::string attribute;
  std::string value;

  auto operator<=>(const InfoPair&) const = default;
};

// Scans text left to right against the KB value lexicon, taking the
// longest match at each position (ties resolved by schema attribute
// order), then skipping past it. Every returned pair is in the lexicon.
std::set<InfoPair> extract_info(const Words& text, const KnowledgeBase& kb);

// A turn is consistent when some single KB entity carries every info pair
// extracted from its user utterance and system response together. Turns
// with nothing extractable are vacuous.
// Returns nullopt for vacuous turns, otherwise the consistency bit.
std::optional<bool> turn_consistent(const Words& user, const Words& response,
                                    const KnowledgeBase& kb);

struct ConsistencyResult {
  double value = 1.0;  // mean over counted turns
  int turns = 0;
  int vacuous = 0;
  int consistent = 0;  // vacuous turns included unless excluded below
};

// Vacuous turns count as consistent by definition; pass exclude_vacuous to
// drop them from the average instead. An average over zero counted turns
// is defined as 1.
ConsistencyResult consistency(const std::vector<std::pair<Words, Words>>& turns,
                              const KnowledgeBase& kb, bool exclude_vacuous = false);

struct F1Result {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0;
  long long predicted = 0;
  long long referenced = 0;
};

// Micro-averaged F1 of extracted info pairs, predictions against
// references, over aligned turn lists.
F1Result info_f1(const std::vector<Words>& predictions, const std::vector<Words>& references,
                 const KnowledgeBase& kb);

struct InformSuccess {
  bool inform = false;
  bool success = false;
};

// Inform: some response names (contiguously mentions the name of) an
// entity satisfying every goal constraint. Success: inform holds and each
// requested attribute's value, for some named goal-matching entity,
// appears in the responses.
InformSuccess inform_success(const std::vector<Words>& responses, const UserGoal& goal,
                             const KnowledgeBase& kb);

// Corpus 4-gram BLEU on a 0-100 scale: exact unigram precision, add-one
// smoothed orders 2-4, uniform weights, brevity penalty. Identical corpora
// score 100, zero unigram overlap scores 0.
double bleu(const std::vector<Words>& predictions, const std::vector<Words>& references);

// Combined quality score, all inputs on a 0-100 scale.
double score(double bleu_value, double inform_pct, double success_pct);

struct MetricsBundle {
  double bleu = 0.0;
  double inform = 0.0;   // percent
  double success = 0.0;  // percent
  double score = 0.0;
  double f1 = 0.0;       // percent
  double consistency = 0.0;  // percent
  int dialogs = 0;
  int turns = 0;

  nlohmann::json to_json() const;  // rounded to 2 decimals
};

struct TurnPrediction {
  Words entity;    // generated linearization words, no <eos>
  Words response;  // generated response words
  bool has_entity = false;
  bool entity_valid = false;
};

struct DialogPrediction {
  std::string dialog_id;
  std::vector<TurnPrediction> turns;
};

void save_predictions(const std::string& path, const std::vector<DialogPrediction>& preds);
std::vector<DialogPrediction> load_predictions(const std::string& path);

struct MetricsReport {
  MetricsBundle overall;
  double entity_validity = 0.0;  // percent of generated entities in the KB
  int entities_generated = 0;
  std::map<std::string, MetricsBundle> per_domain;
  // Dialogs whose goal matches exactly one KB entity vs several.
  MetricsBundle single_match;
  MetricsBundle multi_match;

  nlohmann::json to_json() const;
};

// Full evaluation of aligned predictions against reference dialogs.
// Consistency pairs the reference user utterance with the predicted
// response; inform/success judge predicted responses against the
// reference goal.
MetricsReport evaluate_corpus(const std::vector<Dialog>& refs,
                              const std::vector<DialogPrediction>& preds,
                              const KnowledgeBase& kb);

}  // namespace eco

#endif  // ECO_METRICS_H_
