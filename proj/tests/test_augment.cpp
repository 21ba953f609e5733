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

#include <set>

#include "doctest.h"
#include "eco/metrics.hpp"
#include "test_util.hpp"

namespace {

using eco::Dialog;
using eco::KnowledgeBase;
using eco::Span;
using eco::Template;
using eco::Words;
using eco::testutil::fixture_dialog;
using eco::testutil::fixture_kb;

TEST_CASE("delex replaces annotated values with placeholders") {
  KnowledgeBase kb = fixture_kb();
  Dialog d = fixture_dialog();
  auto t = eco::delex(d, kb);
  REQUIRE(t.has_value());
  CHECK(t->source_entity == 0);
  CHECK(t->matched_attributes == std::set<std::string>{"food", "name", "price"});
  CHECK(t->dialog.turns[0].user ==
        Words{"i", "am", "looking", "for", "[food]", "food"});
  CHECK(t->dialog.turns[0].response == Words{"you", "could", "try", "[name]"});
  CHECK(t->dialog.turns[1].response == Words{"[name]", "has", "[price]", "price"});
  // spans now cover single placeholder tokens
  for (const eco::DialogTurn& turn : t->dialog.turns) {
    for (const Span& s : turn.spans) {
      CHECK(s.end == s.start + 1);
      CHECK(turn.side(s.side)[s.start] == "[" + s.attribute + "]");
    }
  }
}

TEST_CASE("delex picks the lowest-id entity containing all mentions") {
  KnowledgeBase kb = fixture_kb();
  Dialog d;
  d.id = "amb";
  d.domain = "eatery";
  eco::DialogTurn t;
  t.user = eco::split_words("somewhere in the north please");
  t.response = eco::split_words("sure");
  t.spans.push_back({Span::Side::kUser, 3, 4, "area"});
  d.turns.push_back(t);
  // north matches entities 0 and 2; the lowest id wins.
  auto tpl = eco::delex(d, kb);
  REQUIRE(tpl.has_value());
  CHECK(tpl->source_entity == 0);
}

TEST_CASE("delex skips dialogs without spans or without a covering entity") {
  KnowledgeBase kb = fixture_kb();
  eco::AugmentStats stats;

  Dialog plain;
  plain.id = "plain";
  plain.domain = "eatery";
  eco::DialogTurn t;
  t.user = eco::split_words("hello");
  t.response = eco::split_words("hi");
  plain.turns.push_back(t);
  CHECK(!eco::delex(plain, kb, &stats).has_value());
  CHECK(stats.skipped_no_spans == 1);

  Dialog clash = fixture_dialog();
  // italian food but gourmet kitchen: no single entity covers both
  clash.turns[0].response = eco::split_words("you could try gourmet kitchen");
  CHECK(!eco::delex(clash, kb, &stats).has_value());
  CHECK(stats.skipped_no_entity == 1);
}

TEST_CASE("relex with the source entity reproduces the dialog") {
  KnowledgeBase kb = fixture_kb();
  Dialog d = fixture_dialog();
  auto tpl = eco::delex(d, kb);
  REQUIRE(tpl.has_value());
  auto back = eco::relex(*tpl, kb.entity(tpl->source_entity), kb);
  REQUIRE(back.has_value());
  CHECK(eco::same_surface(*back, d));
  // augmented turns carry the gold entity on span-bearing turns
  for (const eco::DialogTurn& turn : back->turns) {
    if (!turn.spans.empty()) CHECK(turn.gold_entity == 0);
  }
}

TEST_CASE("relex rewrites goal constraints and multiword values") {
  KnowledgeBase kb = fixture_kb();
  Dialog d = fixture_dialog();
  auto tpl = eco::delex(d, kb);
  REQUIRE(tpl.has_value());
  // entity 1: silver garden, north american, moderate
  auto out = eco::relex(*tpl, kb.entity(1), kb);
  REQUIRE(out.has_value());
  CHECK(out->goal.constraints.at("food") == "north american");
  CHECK(out->turns[0].user ==
        Words{"i", "am", "looking", "for", "north", "american", "food"});
  CHECK(out->turns[0].response == Words{"you", "could", "try", "silver", "garden"});
  CHECK(out->id == d.id + "-au1");
  // span bounds track the longer fill
  const Span& food = out->turns[0].spans[0];
  CHECK(food.start == 4);
  CHECK(food.end == 6);
  // relexed turns are consistent with the KB by construction
  for (const eco::DialogTurn& turn : out->turns) {
    auto c = eco::turn_consistent(turn.user, turn.response, kb);
    if (c.has_value()) CHECK(*c);
  }
}

TEST_CASE("relex refuses an entity missing a matched value") {
  eco::AttributeSchema schema{{"name", "area", "food", "price"}};
  std::vector<eco::Entity> es = fixture_kb().entities();
  es.push_back(eco::testutil::make_entity(4, {{"name", "void diner"},
                                              {"area", "north"},
                                              {"food", "italian"},
                                              {"price", "none"}}));
  KnowledgeBase kb(schema, std::move(es));
  Dialog d = fixture_dialog();  // template matches name, food, price
  auto tpl = eco::delex(d, kb);
  REQUIRE(tpl.has_value());
  CHECK(!eco::relex(*tpl, kb.entity(4), kb).has_value());
}

TEST_CASE("augment_batch samples goal-matching entities up to p") {
  KnowledgeBase kb = fixture_kb();
  Dialog d = fixture_dialog();
  d.goal.constraints = {{"price", "cheap"}};  // matches entities 0 and 3
  d.goal.requests = {};
  auto tpl = eco::delex(d, kb);
  REQUIRE(tpl.has_value());

  eco::AugmentStats stats;
  std::vector<Dialog> out = eco::augment_batch({*tpl}, kb, 5, 99, &stats);
  CHECK(out.size() == 2);  // only two entities match, p caps above that
  CHECK(stats.dialogs_out == 2);
  std::set<int> sources;
  for (const Dialog& a : out) {
    REQUIRE(a.turns[0].gold_entity.has_value());
    sources.insert(*a.turns[0].gold_entity);
    // the rewritten goal matches the filled entity
    CHECK(eco::goal_matches(kb.entity(*a.turns[0].gold_entity), a.goal));
  }
  CHECK(sources == std::set<int>{0, 3});

  std::vector<Dialog> one = eco::augment_batch({*tpl}, kb, 1, 99);
  CHECK(one.size() == 1);
}

TEST_CASE("augment_batch is deterministic and seed-sensitive") {
  KnowledgeBase kb = fixture_kb();
  auto tpl = eco::delex(fixture_dialog(), kb);
  REQUIRE(tpl.has_value());
  std::vector<Template> tpls = {*tpl, *tpl};

  auto ids = [](const std::vector<Dialog>& ds) {
    std::vector<std::string> out;
    for (const Dialog& d : ds) out.push_back(d.id + "/" + d.turns[0].user.back());
    return out;
  };
  CHECK(ids(eco::augment_batch(tpls, kb, 2, 7)) == ids(eco::augment_batch(tpls, kb, 2, 7)));
}

TEST_CASE("build_training_sets keeps originals unlabeled") {
  KnowledgeBase kb = fixture_kb();
  std::vector<Dialog> d_tr = {fixture_dialog()};
  eco::TrainingSets sets = eco::build_training_sets(d_tr, kb, 2, 7);
  CHECK(sets.d_tr.size() == 1);
  CHECK(!sets.d_au.empty());
  for (const eco::DialogTurn& t : sets.d_tr[0].turns) CHECK(!t.gold_entity.has_value());
  for (const Dialog& d : sets.d_au) {
    bool labeled = false;
    for (const eco::DialogTurn& t : d.turns) labeled |= t.gold_entity.has_value();
    CHECK(labeled);
  }
  CHECK(sets.joined().size() == sets.d_tr.size() + sets.d_au.size());
}

}  // namespace
