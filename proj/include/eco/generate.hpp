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

#ifndef ECO_GENERATE_H_
#define ECO_GENERATE_H_

#include "eco/metrics.hpp"
#include "eco/model.hpp"
#include "eco/rng.hpp"

namespace eco {

struct DecodeConfig {
  enum class Mode { kGreedy, kTopK };
  Mode mode = Mode::kGreedy;
  int top_k = 5;              // kTopK only
  double temperature = 1.0;   // applied to logits before softmax
  uint64_t seed = 0;          // kTopK sampling stream

  nlohmann::json to_json() const;
  static DecodeConfig from_json(const nlohmann::json& j);
};

struct TurnGeneration {
  TokenSeq entity;    // linearization tokens, trailing <eos> kept when reached
  bool entity_valid = false;  // exact match of a KB entity path
  TokenSeq response;  // surface tokens, <eos> stripped
};

// Greedy argmax (lowest id on ties) or top-k sampling over a probability
// vector. Exposed for tests.
int pick_token(const Mat& dist, const DecodeConfig& cfg, Rng& rng);

// Generates the entity and then the response for one encoder input.
// Entity decoding is constrained by the trie when mcfg.use_trie is set;
// validity is measured against the trie either way. The response is
// conditioned on the generated entity as tokens, or as distribution mixes
// when mcfg.logit_eval is set.
TurnGeneration generate_turn(const ModelParams& params, const EntityTrie& trie,
                             const TokenSeq& input, const ModelConfig& mcfg,
                             const DecodeConfig& dcfg, Rng& rng);

// Runs generate_turn over every turn of every dialog, conditioning on the
// reference context (previous gold turns), and packages predictions for
// evaluation. Deterministic given (params, dialogs, configs).
std::vector<DialogPrediction> generate_corpus(const ModelParams& params,
                                              const Vocabulary& vocab, const EntityTrie& trie,
                                              const KnowledgeBase& kb,
                                              const std::vector<Dialog>& dialogs,
                                              const ModelConfig& mcfg,
                                              const DecodeConfig& dcfg);

}  // namespace eco

#endif  // ECO_GENERATE_H_
