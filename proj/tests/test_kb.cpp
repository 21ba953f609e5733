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

#include "eco/kb.hpp"

#include <vector>

#include "doctest.h"
#include "test_util.hpp"

namespace {

using eco::AttributeSchema;
using eco::Entity;
using eco::KnowledgeBase;
using eco::UserGoal;
using eco::Vocabulary;
using eco::Words;
using eco::testutil::fixture_kb;
using eco::testutil::make_entity;

TEST_CASE("split_words lowercases and splits on whitespace") {
  CHECK(eco::split_words("  Golden  PALACE\tnow ") == Words{"golden", "palace", "now"});
  CHECK(eco::split_words("") == Words{});
  CHECK(eco::join_words({"a", "b"}) == "a b");
  CHECK(eco::normalize("North  American") == "north american");
}

TEST_CASE("schema lookups and placeholders") {
  AttributeSchema s{{"name", "area"}};
  CHECK(s.index_of("area") == 1);
  CHECK(s.index_of("food") == -1);
  CHECK(s.contains("name"));
  CHECK(AttributeSchema::placeholder("food") == "[food]");
}

TEST_CASE("kb construction validates its inputs") {
  AttributeSchema s{{"name", "area"}};
  auto ok = [&](std::vector<Entity> es) { return KnowledgeBase(s, std::move(es)); };
  CHECK_NOTHROW(ok({make_entity(0, {{"name", "alpha"}, {"area", "north"}})}));

  // name attribute is mandatory in the schema
  CHECK_THROWS_AS(KnowledgeBase(AttributeSchema{{"area"}},
                                {make_entity(0, {{"area", "north"}})}),
                  eco::Error);
  // ids must be 0..n-1 in order
  CHECK_THROWS_AS(ok({make_entity(1, {{"name", "alpha"}, {"area", "north"}})}), eco::Error);
  // duplicate names collide in the trie, so they are rejected up front
  CHECK_THROWS_AS(ok({make_entity(0, {{"name", "alpha"}, {"area", "north"}}),
                      make_entity(1, {{"name", "alpha"}, {"area", "south"}})}),
                  eco::Error);
  // a name may not be the missing-value sentinel
  CHECK_THROWS_AS(ok({make_entity(0, {{"name", "none"}, {"area", "north"}})}), eco::Error);
  // empty kb is rejected
  CHECK_THROWS_AS(ok({}), eco::Error);
}

TEST_CASE("kb json round trip fills missing attributes with the sentinel") {
  KnowledgeBase kb = fixture_kb();
  KnowledgeBase back = KnowledgeBase::from_json(kb.to_json());
  CHECK(back.fingerprint() == kb.fingerprint());
  CHECK(back.size() == 4);

  nlohmann::json j = kb.to_json();
  j["entities"][0].erase("area");
  KnowledgeBase filled = KnowledgeBase::from_json(j);
  CHECK(filled.entity(0).value("area") == eco::kNoneValue);
  CHECK(!filled.entity(0).has_value("area"));
  CHECK(filled.fingerprint() != kb.fingerprint());

  j["entities"][0]["bogus"] = "x";
  CHECK_THROWS_AS(KnowledgeBase::from_json(j), eco::Error);
}

TEST_CASE("value lexicon is schema-ordered, deduplicated, sentinel-free") {
  KnowledgeBase kb = fixture_kb();
  const auto& lex = kb.value_lexicon();
  // 4 names + 4 areas (north south east, north deduped across entities... east)
  // spot checks instead of a full dump:
  CHECK(lex.front().attribute == "name");
  bool saw_none = false;
  int north_area = 0;
  for (const auto& le : lex) {
    if (eco::join_words(le.value) == "none") saw_none = true;
    if (le.attribute == "area" && eco::join_words(le.value) == "north") north_area++;
  }
  CHECK(!saw_none);
  CHECK(north_area == 1);  // deduplicated across the two north entities
  CHECK(kb.lexicon_contains("food", {"north", "american"}));
  CHECK(!kb.lexicon_contains("area", {"north", "american"}));
}

TEST_CASE("goal matching is exact per constraint") {
  KnowledgeBase kb = fixture_kb();
  UserGoal g;
  g.constraints = {{"area", "north"}};
  CHECK(kb.matching_entities(g) == std::vector<int>{0, 2});
  g.constraints = {{"area", "north"}, {"food", "italian"}};
  CHECK(kb.matching_entities(g) == std::vector<int>{0});
  g.constraints = {{"area", "west"}};
  CHECK(kb.matching_entities(g).empty());
  UserGoal empty;
  CHECK(kb.matching_entities(empty).size() == 4);  // no constraints match all
}

TEST_CASE("vocabulary layout: reserved, placeholders, sorted open words") {
  KnowledgeBase kb = fixture_kb();
  Vocabulary v = Vocabulary::build(kb, {"zeta alpha", "alpha"});
  CHECK(v.word_of(Vocabulary::kPad) == "<pad>");
  CHECK(v.word_of(Vocabulary::kBos) == "<bos>");
  CHECK(v.word_of(Vocabulary::kEos) == "<eos>");
  CHECK(v.word_of(Vocabulary::kUnk) == "<unk>");
  CHECK(v.word_of(4) == "[name]");
  CHECK(v.word_of(5) == "[area]");
  CHECK(v.word_of(6) == "[food]");
  CHECK(v.word_of(7) == "[price]");
  // open words sorted; KB values present even when absent from texts
  CHECK(v.contains("golden"));
  CHECK(v.contains("zeta"));
  CHECK(v.id_of("missing-word") == Vocabulary::kUnk);
  CHECK(v.placeholder_id("food") == 6);
  CHECK_THROWS_AS(v.placeholder_id("bogus"), eco::Error);
  for (int i = 8; i + 1 < v.size(); ++i) CHECK(v.word_of(i) < v.word_of(i + 1));

  Vocabulary back = Vocabulary::from_words(v.words());
  CHECK(back.size() == v.size());
  CHECK(back.id_of("zeta") == v.id_of("zeta"));
  CHECK_THROWS_AS(Vocabulary::from_words({"a", "b"}), eco::Error);
}

TEST_CASE("tokenize round trips through ids") {
  KnowledgeBase kb = fixture_kb();
  Vocabulary v = Vocabulary::build(kb, {"hello there"});
  eco::TokenSeq ids = eco::tokenize("Hello  golden PALACE", v);
  CHECK(eco::detokenize(ids, v) == "hello golden palace");
  CHECK(eco::to_words(eco::to_ids({"hello", "nope"}, v), v) == Words{"hello", "<unk>"});
}

TEST_CASE("entity linearization follows schema order and ends with eos") {
  KnowledgeBase kb = fixture_kb();
  Vocabulary v = Vocabulary::build(kb, {});
  eco::TokenSeq seq = eco::linearize_entity(kb.entity(1), kb.schema(), v);
  Words w = eco::to_words(seq, v);
  CHECK(w == Words{"[name]", "silver", "garden", "[area]", "south", "[food]", "north",
                   "american", "[price]", "moderate", "<eos>"});
  CHECK(seq.back() == Vocabulary::kEos);
  CHECK(eco::linearize_entity_words(kb.entity(3), kb.schema()) ==
        Words{"[name]", "palace", "[area]", "east", "[food]", "thai", "[price]", "cheap"});
}

TEST_CASE("fingerprint tracks content not object identity") {
  KnowledgeBase a = fixture_kb();
  KnowledgeBase b = fixture_kb();
  CHECK(a.fingerprint() == b.fingerprint());
  AttributeSchema s{{"name", "area"}};
  KnowledgeBase c(s, {make_entity(0, {{"name", "alpha"}, {"area", "north"}})});
  CHECK(c.fingerprint() != a.fingerprint());
}

}  // namespace
