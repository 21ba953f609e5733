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

#include "eco/augment.hpp"

#include <algorithm>
#include <functional>

#include "eco/rng.hpp"

namespace eco {

namespace {

// Rebuilds one side of a turn with each span's tokens replaced by a
// substitution, emitting adjusted spans. Substitutions may change length,
// so all downstream indices shift.
struct Replacement {
  Span span;
  Words with;
};

void apply_replacements(Words& tokens, std::vector<Span>& out_spans, Span::Side side,
                        std::vector<Replacement> reps) {
  std::sort(reps.begin(), reps.end(),
            [](const Replacement& a, const Replacement& b) { return a.span.start < b.span.start; });
  Words result;
  int cursor = 0;
  for (const Replacement& r : reps) {
    ECO_CHECK(r.span.start >= cursor && r.span.end <= static_cast<int>(tokens.size()),
              "overlapping or out-of-range spans");
    result.insert(result.end(), tokens.begin() + cursor, tokens.begin() + r.span.start);
    Span adjusted;
    adjusted.side = side;
    adjusted.start = static_cast<int>(result.size());
    result.insert(result.end(), r.with.begin(), r.with.end());
    adjusted.end = static_cast<int>(result.size());
    adjusted.attribute = r.span.attribute;
    out_spans.push_back(adjusted);
    cursor = r.span.end;
  }
  result.insert(result.end(), tokens.begin() + cursor, tokens.end());
  tokens = std::move(result);
}

DialogTurn substitute_turn(const DialogTurn& t,
                           const std::function<Words(const Span&)>& value_for) {
  DialogTurn out;
  out.user = t.user;
  out.response = t.response;
  for (Span::Side side : {Span::Side::kUser, Span::Side::kResponse}) {
    std::vector<Replacement> reps;
    for (const Span& s : t.spans) {
      if (s.side == side) reps.push_back(Replacement{s, value_for(s)});
    }
    apply_replacements(out.side(side), out.spans, side, std::move(reps));
  }
  return out;
}

}  // namespace

nlohmann::json AugmentStats::to_json() const {
  return nlohmann::json{{"version", 1},
                        {"dialogs_in", dialogs_in},
                        {"templates_out", templates_out},
                        {"skipped_no_spans", skipped_no_spans},
                        {"skipped_no_entity", skipped_no_entity},
                        {"templates_in", templates_in},
                        {"dialogs_out", dialogs_out},
                        {"skipped_empty_goal_match", skipped_empty_goal_match},
                        {"skipped_missing_value", skipped_missing_value}};
}

std::optional<Template> delex(const Dialog& d, const KnowledgeBase& kb, AugmentStats* stats) {
  validate_dialog(d, kb.schema());
  if (stats) ++stats->dialogs_in;

  // Values the annotation claims, per attribute. Two different values for
  // one attribute can never agree with a single entity.
  std::map<std::string, std::set<std::string>> mentioned;
  int span_count = 0;
  for (const DialogTurn& t : d.turns) {
    for (const Span& s : t.spans) {
      const Words& toks = t.side(s.side);
      Words value(toks.begin() + s.start, toks.begin() + s.end);
      mentioned[s.attribute].insert(join_words(value));
      ++span_count;
    }
  }
  if (span_count == 0) {
    if (stats) ++stats->skipped_no_spans;
    return std::nullopt;
  }

  int match = -1;
  for (const Entity& e : kb.entities()) {
    bool ok = true;
    for (const auto& [attr, values] : mentioned) {
      if (values.size() != 1 || e.value(attr) != *values.begin()) {
        ok = false;
        break;
      }
    }
    if (ok) {
      match = e.id;
      break;  // lowest entity id wins
    }
  }
  if (match < 0) {
    if (stats) ++stats->skipped_no_entity;
    return std::nullopt;
  }

  Template out;
  out.source_entity = match;
  out.dialog.id = d.id;
  out.dialog.domain = d.domain;
  out.dialog.goal = d.goal;
  for (const DialogTurn& t : d.turns) {
    out.dialog.turns.push_back(substitute_turn(
        t, [](const Span& s) { return Words{AttributeSchema::placeholder(s.attribute)}; }));
  }
  for (const auto& [attr, values] : mentioned) out.matched_attributes.insert(attr);
  if (stats) ++stats->templates_out;
  return out;
}

std::vector<Template> delex_corpus(const std::vector<Dialog>& dialogs, const KnowledgeBase& kb,
                                   AugmentStats* stats) {
  std::vector<Template> out;
  for (const Dialog& d : dialogs) {
    if (auto t = delex(d, kb, stats)) out.push_back(std::move(*t));
  }
  return out;
}

std::optional<Dialog> relex(const Template& t, const Entity& e, const KnowledgeBase& kb) {
  for (const std::string& attr : t.matched_attributes) {
    ECO_CHECK(kb.schema().contains(attr), "template attribute '" << attr << "' absent from schema");
    if (!e.has_value(attr)) return std::nullopt;
  }

  Dialog out;
  out.id = t.dialog.id + "-au" + std::to_string(e.id);
  out.domain = t.dialog.domain;
  out.goal = t.dialog.goal;
  // The rewritten dialog talks about e, so its goal must as well; otherwise
  // goal-based metrics would judge it against the template's old entity.
  for (auto& [attr, value] : out.goal.constraints) {
    auto it = e.values.find(attr);
    if (it != e.values.end()) value = it->second;
  }
  for (const DialogTurn& turn : t.dialog.turns) {
    DialogTurn filled = substitute_turn(
        turn, [&](const Span& s) { return split_words(e.value(s.attribute)); });
    if (!filled.spans.empty()) filled.gold_entity = e.id;
    out.turns.push_back(std::move(filled));
  }
  return out;
}

std::vector<Dialog> augment_batch(const std::vector<Template>& templates,
                                  const KnowledgeBase& kb, int p, uint64_t seed,
                                  AugmentStats* stats) {
  ECO_CHECK(p >= 0, "augment_batch: p must be non-negative");
  std::vector<Dialog> out;
  Rng root(seed);
  for (size_t i = 0; i < templates.size(); ++i) {
    const Template& t = templates[i];
    if (stats) ++stats->templates_in;
    std::vector<int> candidates = kb.matching_entities(t.dialog.goal);
    if (candidates.empty()) {
      if (stats) ++stats->skipped_empty_goal_match;
      continue;
    }
    Rng rng = root.fork(i);
    rng.shuffle(candidates);
    const int take = std::min<int>(p, static_cast<int>(candidates.size()));
    for (int k = 0; k < take; ++k) {
      std::optional<Dialog> d = relex(t, kb.entity(candidates[k]), kb);
      if (!d) {
        if (stats) ++stats->skipped_missing_value;
        continue;
      }
      if (stats) ++stats->dialogs_out;
      out.push_back(std::move(*d));
    }
  }
  return out;
}

TrainingSets build_training_sets(const std::vector<Dialog>& d_tr, const KnowledgeBase& kb,
                                 int p, uint64_t seed, AugmentStats* stats) {
  TrainingSets sets;
  sets.d_tr = d_tr;
  std::vector<Template> templates = delex_corpus(d_tr, kb, stats);
  sets.d_au = augment_batch(templates, kb, p, seed, stats);
  return sets;
}

}  // namespace eco
