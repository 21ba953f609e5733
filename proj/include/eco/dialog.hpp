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

#ifndef ECO_DIALOG_H_
#define ECO_DIALOG_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eco/kb.hpp"

namespace eco {

// Half-open token range [start, end) inside one side of a turn, annotated
// with the KB attribute whose value the tokens spell.
struct Span {
  enum class Side { kUser, kResponse };
  Side side = Side::kUser;
  int start = 0;
  int end = 0;
  std::string attribute;

  bool operator==(const Span&) const = default;
};

struct DialogTurn {
  Words user;      // normalized word tokens
  Words response;  // normalized word tokens
  std::vector<Span> spans;
  // Set only on augmented turns: the KB entity the turn's values came from.
  std::optional<int> gold_entity;

  const Words& side(Span::Side s) const { return s == Span::Side::kUser ? user : response; }
  Words& side(Span::Side s) { return s == Span::Side::kUser ? user : response; }

  bool operator==(const DialogTurn&) const = default;
};

struct Dialog {
  std::string id;
  std::string domain;
  UserGoal goal;
  std::vector<DialogTurn> turns;
  // Synthetic-corpus provenance; never consumed by training.
  std::optional<int> meta_source_entity;

  nlohmann::json to_json() const;
  static Dialog from_json(const nlohmann::json& j);
};

// Turns with every annotated value replaced by its attribute placeholder;
// spans shrink to the single placeholder token they cover.
struct Template {
  Dialog dialog;
  std::set<std::string> matched_attributes;
  int source_entity = -1;  // the entity the original dialog agreed with
};

struct TrainingSets {
  std::vector<Dialog> d_tr;  // original dialogs, no entity labels
  std::vector<Dialog> d_au;  // augmented dialogs with gold entity labels

  std::vector<Dialog> joined() const;
};

// Dialog content identity that ignores entity labels and provenance; used
// to check that relexing a template with its source entity reproduces the
// original dialog.
bool same_surface(const Dialog& a, const Dialog& b);

// JSONL with a leading {"version":1,"kind":"dialogs"} header line. Readers
// accept files without the header.
void save_dialogs(const std::string& path, const std::vector<Dialog>& dialogs);
std::vector<Dialog> load_dialogs(const std::string& path);

// Every user / response string in a dialog file, for vocabulary building.
std::vector<std::string> collect_dialog_texts(const std::string& path);

// Structural checks that need the schema: span ranges, overlap, attributes.
void validate_dialog(const Dialog& d, const AttributeSchema& schema);

void save_goals(const std::string& path, const std::vector<UserGoal>& goals);
std::vector<UserGoal> load_goals(const std::string& path);

}  // namespace eco

#endif  // ECO_DIALOG_H_
