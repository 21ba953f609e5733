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

#include "eco/dialog.hpp"

#include <algorithm>
#include <tuple>

#include "eco/jsonio.hpp"

namespace eco {

namespace {

const char* side_name(Span::Side s) { return s == Span::Side::kUser ? "user" : "response"; }

Span::Side side_from_name(const std::string& s) {
  if (s == "user") return Span::Side::kUser;
  if (s == "response") return Span::Side::kResponse;
  throw Error("span side must be 'user' or 'response', got '" + s + "'");
}

nlohmann::json turn_to_json(const DialogTurn& t) {
  nlohmann::json spans = nlohmann::json::array();
  for (const Span& s : t.spans) {
    spans.push_back(nlohmann::json{{"side", side_name(s.side)},
                                   {"start", s.start},
                                   {"end", s.end},
                                   {"attribute", s.attribute}});
  }
  nlohmann::json j{{"user", join_words(t.user)},
                   {"response", join_words(t.response)},
                   {"spans", std::move(spans)}};
  if (t.gold_entity) j["gold_entity"] = *t.gold_entity;
  return j;
}

DialogTurn turn_from_json(const nlohmann::json& j) {
  ECO_CHECK(j.is_object() && j.contains("user") && j.contains("response"),
            "turn must have 'user' and 'response'");
  DialogTurn t;
  t.user = split_words(j["user"].get<std::string>());
  t.response = split_words(j["response"].get<std::string>());
  if (j.contains("spans")) {
    for (const auto& sj : j["spans"]) {
      Span s;
      s.side = side_from_name(sj.at("side").get<std::string>());
      s.start = sj.at("start").get<int>();
      s.end = sj.at("end").get<int>();
      s.attribute = normalize(sj.at("attribute").get<std::string>());
      const Words& toks = t.side(s.side);
      ECO_CHECK(s.start >= 0 && s.start < s.end && s.end <= static_cast<int>(toks.size()),
                "span [" << s.start << "," << s.end << ") out of range on "
                         << side_name(s.side) << " side");
      t.spans.push_back(std::move(s));
    }
  }
  if (j.contains("gold_entity") && !j["gold_entity"].is_null()) {
    t.gold_entity = j["gold_entity"].get<int>();
  }
  return t;
}

}  // namespace

nlohmann::json Dialog::to_json() const {
  nlohmann::json turns_j = nlohmann::json::array();
  for (const DialogTurn& t : turns) turns_j.push_back(turn_to_json(t));
  nlohmann::json j{{"id", id},
                   {"domain", domain},
                   {"goal", goal.to_json()},
                   {"turns", std::move(turns_j)}};
  if (meta_source_entity) j["meta"] = nlohmann::json{{"source_entity", *meta_source_entity}};
  return j;
}

Dialog Dialog::from_json(const nlohmann::json& j) {
  ECO_CHECK(j.is_object() && j.contains("id") && j.contains("turns"),
            "dialog must have 'id' and 'turns'");
  Dialog d;
  d.id = j["id"].get<std::string>();
  d.domain = j.value("domain", std::string{});
  if (j.contains("goal")) d.goal = UserGoal::from_json(j["goal"]);
  for (const auto& tj : j["turns"]) d.turns.push_back(turn_from_json(tj));
  ECO_CHECK(!d.turns.empty(), "dialog '" << d.id << "' has no turns");
  if (j.contains("meta") && j["meta"].contains("source_entity")) {
    d.meta_source_entity = j["meta"]["source_entity"].get<int>();
  }
  return d;
}

std::vector<Dialog> TrainingSets::joined() const {
  std::vector<Dialog> out = d_tr;
  out.insert(out.end(), d_au.begin(), d_au.end());
  return out;
}

bool same_surface(const Dialog& a, const Dialog& b) {
  if (a.turns.size() != b.turns.size()) return false;
  for (size_t i = 0; i < a.turns.size(); ++i) {
    const DialogTurn& x = a.turns[i];
    const DialogTurn& y = b.turns[i];
    if (x.user != y.user || x.response != y.response) return false;
    auto key = [](const Span& s) { return std::tuple(s.side, s.start, s.end, s.attribute); };
    std::vector<Span> xs = x.spans, ys = y.spans;
    auto lt = [&](const Span& p, const Span& q) { return key(p) < key(q); };
    std::sort(xs.begin(), xs.end(), lt);
    std::sort(ys.begin(), ys.end(), lt);
    if (xs != ys) return false;
  }
  return a.goal.constraints == b.goal.constraints && a.goal.requests == b.goal.requests;
}

void save_dialogs(const std::string& path, const std::vector<Dialog>& dialogs) {
  std::vector<nlohmann::json> lines;
  lines.push_back(nlohmann::json{{"version", 1}, {"kind", "dialogs"}});
  for (const Dialog& d : dialogs) lines.push_back(d.to_json());
  write_jsonl_file(path, lines);
}

std::vector<Dialog> load_dialogs(const std::string& path) {
  std::vector<Dialog> out;
  for (const nlohmann::json& j : read_jsonl_file(path)) {
    if (j.contains("kind")) {
      ECO_CHECK(j["kind"] == "dialogs", "unexpected kind '" << j["kind"] << "' in " << path);
      continue;
    }
    out.push_back(Dialog::from_json(j));
  }
  return out;
}

std::vector<std::string> collect_dialog_texts(const std::string& path) {
  std::vector<std::string> out;
  for (const nlohmann::json& j : read_jsonl_file(path)) {
    if (j.contains("kind")) continue;
    for (const auto& tj : j.at("turns")) {
      out.push_back(tj.at("user").get<std::string>());
      out.push_back(tj.at("response").get<std::string>());
    }
  }
  return out;
}

void validate_dialog(const Dialog& d, const AttributeSchema& schema) {
  for (size_t ti = 0; ti < d.turns.size(); ++ti) {
    const DialogTurn& t = d.turns[ti];
    for (Span::Side side : {Span::Side::kUser, Span::Side::kResponse}) {
      std::vector<const Span*> side_spans;
      for (const Span& s : t.spans) {
        if (s.side == side) side_spans.push_back(&s);
      }
      std::sort(side_spans.begin(), side_spans.end(),
                [](const Span* a, const Span* b) { return a->start < b->start; });
      int prev_end = 0;
      for (const Span* s : side_spans) {
        ECO_CHECK(schema.contains(s->attribute),
                  "dialog '" << d.id << "' turn " << ti << ": span attribute '"
                             << s->attribute << "' absent from schema");
        ECO_CHECK(s->start >= 0 && s->start < s->end,
                  "dialog '" << d.id << "' turn " << ti << ": empty or inverted span");
        ECO_CHECK(s->end <= static_cast<int>(t.side(side).size()),
                  "dialog '" << d.id << "' turn " << ti << ": span out of range");
        ECO_CHECK(s->start >= prev_end,
                  "dialog '" << d.id << "' turn " << ti << ": overlapping spans");
        prev_end = s->end;
      }
    }
  }
}

void save_goals(const std::string& path, const std::vector<UserGoal>& goals) {
  nlohmann::json arr = nlohmann::json::array();
  for (const UserGoal& g : goals) arr.push_back(g.to_json());
  write_json_file(path, nlohmann::json{{"version", 1}, {"goals", std::move(arr)}});
}

std::vector<UserGoal> load_goals(const std::string& path) {
  nlohmann::json j = read_json_file(path);
  const nlohmann::json& arr = j.is_array() ? j : j.at("goals");
  ECO_CHECK(arr.is_array(), "goals file must hold a list of goals");
  std::vector<UserGoal> out;
  for (const auto& gj : arr) out.push_back(UserGoal::from_json(gj));
  return out;
}

}  // namespace eco
