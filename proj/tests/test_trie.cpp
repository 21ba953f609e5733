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

#include "eco/trie.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "test_util.hpp"

namespace {

using eco::EntityTrie;
using eco::KnowledgeBase;
using eco::TokenSeq;
using eco::Vocabulary;
using eco::testutil::fixture_kb;

struct Fixture {
  KnowledgeBase kb = fixture_kb();
  Vocabulary vocab = Vocabulary::build(kb, {});
  EntityTrie trie = EntityTrie::build(kb, vocab);
};

TEST_CASE("trie stores one path per entity") {
  Fixture f;
  CHECK(f.trie.num_entities() == f.kb.size());
  std::vector<TokenSeq> paths = f.trie.enumerate_paths();
  CHECK(static_cast<int>(paths.size()) == f.kb.size());

  std::set<TokenSeq> expected;
  for (const eco::Entity& e : f.kb.entities()) {
    expected.insert(eco::linearize_entity(e, f.kb.schema(), f.vocab));
  }
  CHECK(std::set<TokenSeq>(paths.begin(), paths.end()) == expected);
  for (const TokenSeq& p : paths) {
    CHECK(f.trie.is_entity(p));
    CHECK(static_cast<int>(p.size()) <= f.trie.max_path_len());
  }
  CHECK(f.trie.source_kb_hash() == f.kb.fingerprint());
}

TEST_CASE("allowed tokens walk the paths") {
  Fixture f;
  // Every entity starts with [name], so the root allows exactly that.
  std::vector<eco::TokenId> root = f.trie.allowed_tokens({});
  CHECK(root == std::vector<eco::TokenId>{f.vocab.placeholder_id("name")});

  // After [name] the children are the distinct first name words.
  std::vector<eco::TokenId> after = f.trie.allowed_tokens({f.vocab.placeholder_id("name")});
  std::set<std::string> words;
  for (eco::TokenId t : after) words.insert(f.vocab.word_of(t));
  CHECK(words == std::set<std::string>{"golden", "silver", "gourmet", "palace"});
  CHECK(std::is_sorted(after.begin(), after.end()));

  // A full path ends at a terminal with no children.
  TokenSeq full = eco::linearize_entity(f.kb.entity(0), f.kb.schema(), f.vocab);
  CHECK(f.trie.allowed_tokens(full).empty());
  TokenSeq prefix(full.begin(), full.end() - 1);
  std::vector<eco::TokenId> last = f.trie.allowed_tokens(prefix);
  CHECK(std::count(last.begin(), last.end(), Vocabulary::kEos) == 1);

  CHECK_THROWS_AS(f.trie.allowed_tokens({Vocabulary::kUnk}), eco::Error);
}

TEST_CASE("prefix and entity predicates") {
  Fixture f;
  TokenSeq full = eco::linearize_entity(f.kb.entity(2), f.kb.schema(), f.vocab);
  for (size_t n = 0; n <= full.size(); ++n) {
    CHECK(f.trie.is_prefix(TokenSeq(full.begin(), full.begin() + n)));
  }
  CHECK(f.trie.is_entity(full));
  TokenSeq partial(full.begin(), full.end() - 1);
  CHECK(!f.trie.is_entity(partial));  // no terminal before <eos>
  CHECK(!f.trie.is_prefix({Vocabulary::kEos}));
  CHECK(!f.trie.is_entity({}));
}

TEST_CASE("shared prefixes share nodes") {
  // golden palace and palace share no prefix ([name] golden vs [name]
  // palace diverge at the first word) but both share the root [name] edge.
  Fixture f;
  // nodes: root + 1 [name] node + the four distinct paths after it; an
  // upper bound is 2 + total path tokens, a lower bound is max depth + 1.
  CHECK(f.trie.node_count() > static_cast<size_t>(f.trie.max_path_len()));
  size_t total_tokens = 0;
  for (const TokenSeq& p : f.trie.enumerate_paths()) total_tokens += p.size();
  CHECK(f.trie.node_count() <= 1 + total_tokens);
}

TEST_CASE("dump names children by vocabulary word") {
  Fixture f;
  nlohmann::json j = f.trie.dump(f.vocab);
  CHECK(j["entities"] == f.kb.size());
  CHECK(j["nodes"].is_array());
  CHECK(j["nodes"][0]["children"].contains("[name]"));
}

TEST_CASE("constrain mirrors the tape op") {
  eco::Mat d = eco::Mat::column({0.1, 0.2, 0.3, 0.4});
  eco::Mat out = eco::constrain(d, {0, 3});
  CHECK(out.a[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(out.a[1] == 0.0);
  CHECK(out.a[2] == 0.0);
  CHECK(out.a[3] == doctest::Approx(0.8).epsilon(1e-12));
  eco::Mat zero = eco::Mat::column({0.0, 1.0});
  CHECK_THROWS_AS(eco::constrain(zero, {0}), eco::Error);
}

}  // namespace
