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

#include "eco/generate.hpp"

#include <set>

#include "doctest.h"
#include "test_util.hpp"

namespace {

using eco::DecodeConfig;
using eco::Mat;
using eco::ModelConfig;
using eco::ModelParams;
using eco::Rng;
using eco::Vocabulary;
using eco::testutil::fixture_dialog;
using eco::testutil::fixture_kb;
using eco::testutil::fixture_texts;

TEST_CASE("decode config json round trip") {
  DecodeConfig c;
  c.mode = DecodeConfig::Mode::kTopK;
  c.top_k = 3;
  c.temperature = 0.5;
  c.seed = 12;
  DecodeConfig back = DecodeConfig::from_json(c.to_json());
  CHECK(back.mode == DecodeConfig::Mode::kTopK);
  CHECK(back.top_k == 3);
  CHECK(back.temperature == 0.5);
  CHECK(back.seed == 12);

  nlohmann::json j = c.to_json();
  j["mode"] = "topk";  // legacy spelling accepted
  CHECK(DecodeConfig::from_json(j).mode == DecodeConfig::Mode::kTopK);
  j["mode"] = "sideways";
  CHECK_THROWS_AS(DecodeConfig::from_json(j), eco::Error);
}

TEST_CASE("greedy pick takes the argmax, lowest id on ties") {
  Rng rng(1);
  DecodeConfig greedy;
  CHECK(eco::pick_token(Mat::column({0.1, 0.6, 0.3}), greedy, rng) == 1);
  CHECK(eco::pick_token(Mat::column({0.4, 0.4, 0.2}), greedy, rng) == 0);
}

TEST_CASE("top-k sampling stays inside the top k and is seed-stable") {
  DecodeConfig cfg;
  cfg.mode = DecodeConfig::Mode::kTopK;
  cfg.top_k = 2;
  Mat dist = Mat::column({0.05, 0.5, 0.05, 0.35, 0.05});
  std::set<int> seen;
  Rng rng(7);
  for (int i = 0; i < 200; ++i) seen.insert(eco::pick_token(dist, cfg, rng));
  CHECK(seen == std::set<int>{1, 3});

  Rng a(9), b(9);
  for (int i = 0; i < 50; ++i) {
    CHECK(eco::pick_token(dist, cfg, a) == eco::pick_token(dist, cfg, b));
  }

  cfg.top_k = 1;  // degenerates to greedy
  Rng c(3);
  CHECK(eco::pick_token(dist, cfg, c) == 1);
}

struct World {
  eco::KnowledgeBase kb = fixture_kb();
  Vocabulary vocab = Vocabulary::build(kb, fixture_texts());
  eco::EntityTrie trie = eco::EntityTrie::build(kb, vocab);
  ModelConfig mcfg;
  World() {
    mcfg.d_model = 6;
    mcfg.max_len = 64;
    mcfg.max_response_len = 8;
  }
};

TEST_CASE("generate_turn yields a valid entity and a bounded response") {
  World w;
  ModelParams params = ModelParams::init(w.vocab.size(), w.mcfg.d_model, 0.08, 17);
  eco::TokenSeq input = {Vocabulary::kBos, 5, 9, Vocabulary::kEos};
  DecodeConfig dcfg;
  Rng rng(0);
  eco::TurnGeneration g = eco::generate_turn(params, w.trie, input, w.mcfg, dcfg, rng);
  CHECK(g.entity_valid);
  CHECK(w.trie.is_entity(g.entity));
  CHECK(static_cast<int>(g.response.size()) <= w.mcfg.max_response_len);
  for (eco::TokenId t : g.response) CHECK(t != Vocabulary::kEos);

  // without the trie the entity is judged against it anyway
  ModelConfig no_trie = w.mcfg;
  no_trie.use_trie = false;
  Rng rng2(0);
  eco::TurnGeneration u = eco::generate_turn(params, w.trie, input, no_trie, dcfg, rng2);
  CHECK(u.entity_valid == w.trie.is_entity(u.entity));

  // logit-mix conditioning is a decode-time switch, not a new model
  ModelConfig le = w.mcfg;
  le.logit_eval = true;
  Rng rng3(0);
  eco::TurnGeneration l = eco::generate_turn(params, w.trie, input, le, dcfg, rng3);
  CHECK(w.trie.is_entity(l.entity));
  CHECK(l.entity == g.entity);  // entity decode does not depend on the switch
}

TEST_CASE("generate_corpus is deterministic and aligned with its input") {
  World w;
  ModelParams params = ModelParams::init(w.vocab.size(), w.mcfg.d_model, 0.08, 23);
  std::vector<eco::Dialog> dialogs = {fixture_dialog()};
  dialogs[0].id = "g-0";
  DecodeConfig dcfg;
  dcfg.mode = DecodeConfig::Mode::kTopK;
  dcfg.top_k = 3;
  dcfg.seed = 5;

  auto a = eco::generate_corpus(params, w.vocab, w.trie, w.kb, dialogs, w.mcfg, dcfg);
  auto b = eco::generate_corpus(params, w.vocab, w.trie, w.kb, dialogs, w.mcfg, dcfg);
  REQUIRE(a.size() == 1);
  CHECK(a[0].dialog_id == "g-0");
  REQUIRE(a[0].turns.size() == dialogs[0].turns.size());
  for (size_t t = 0; t < a[0].turns.size(); ++t) {
    CHECK(a[0].turns[t].response == b[0].turns[t].response);
    CHECK(a[0].turns[t].entity == b[0].turns[t].entity);
    CHECK(a[0].turns[t].has_entity);
    CHECK(a[0].turns[t].entity_valid);  // trie-constrained decode
    // stored entity words drop the terminal marker
    for (const std::string& word : a[0].turns[t].entity) CHECK(word != "<eos>");
  }

  DecodeConfig other = dcfg;
  other.seed = 6;
  auto c = eco::generate_corpus(params, w.vocab, w.trie, w.kb, dialogs, w.mcfg, other);
  CHECK(c.size() == a.size());  // alignment holds whatever the seed
}

}  // namespace
