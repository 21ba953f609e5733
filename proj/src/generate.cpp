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

#include <algorithm>
#include <numeric>

namespace eco {

nlohmann::json DecodeConfig::to_json() const {
  return nlohmann::json{{"mode", mode == Mode::kGreedy ? "greedy" : "top_k"},
                        {"top_k", top_k},
                        {"temperature", temperature},
                        {"seed", seed}};
}

DecodeConfig DecodeConfig::from_json(const nlohmann::json& j) {
  DecodeConfig c;
  const std::string mode = j.value("mode", std::string("greedy"));
  if (mode == "greedy") {
    c.mode = Mode::kGreedy;
  } else if (mode == "top_k" || mode == "topk") {
    c.mode = Mode::kTopK;
  } else {
    throw Error("unknown decode mode '" + mode + "'");
  }
  c.top_k = j.value("top_k", c.top_k);
  c.temperature = j.value("temperature", c.temperature);
  c.seed = j.value("seed", c.seed);
  ECO_CHECK(c.top_k >= 1 && c.temperature > 0.0, "decode config out of range");
  return c;
}

int pick_token(const Mat& dist, const DecodeConfig& cfg, Rng& rng) {
  if (cfg.mode == DecodeConfig::Mode::kGreedy) return argmax_lowest(dist);

  std::vector<int> order(dist.rows);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dist.a[a] != dist.a[b]) return dist.a[a] > dist.a[b];
    return a < b;  // deterministic tie order
  });
  const int k = std::min<int>(cfg.top_k, dist.rows);
  double z = 0.0;
  for (int i = 0; i < k; ++i) z += dist.a[order[i]];
  ECO_CHECK(z > 0.0, "pick_token: no probability mass in the top " << k);
  const double u = rng.uniform() * z;
  double cum = 0.0;
  int picked = order[0];
  for (int i = 0; i < k; ++i) {
    const double p = dist.a[order[i]];
    if (p <= 0.0) break;  // sorted, so the rest are zero too
    cum += p;
    picked = order[i];
    if (u < cum) break;
  }
  return picked;
}

namespace {

TokenSeq decode_response(model::TapeModel& m, ad::NodeId h, const ModelConfig& mcfg,
                         const DecodeConfig& dcfg, Rng& rng) {
  ad::Tape& t = *m.tape;
  TokenSeq out;
  ad::NodeId state = h;
  TokenId prev = Vocabulary::kBos;
  for (int step = 0; step < mcfg.max_response_len; ++step) {
    state = m.gru_step(m.dec_response, m.embed(prev), state);
    ad::NodeId logits = m.logits(state);
    if (dcfg.temperature != 1.0) logits = t.scale(logits, 1.0 / dcfg.temperature);
    const int tok = pick_token(t.val(t.softmax(logits)), dcfg, rng);
    if (tok == Vocabulary::kEos) break;
    out.push_back(tok);
    prev = tok;
  }
  return out;
}

}  // namespace

TurnGeneration generate_turn(const ModelParams& params, const EntityTrie& trie,
                             const TokenSeq& input, const ModelConfig& mcfg,
                             const DecodeConfig& dcfg, Rng& rng) {
  ad::Tape tape;
  model::TapeModel m = model::TapeModel::bind(tape, params, /*requires_grad=*/false);
  std::vector<ad::NodeId> hs = model::encode(m, input);
  const ad::NodeId g = hs.back();

  const EntityTrie* walk = mcfg.use_trie ? &trie : nullptr;
  model::TokenPicker picker = [&](const Mat& d) { return pick_token(d, dcfg, rng); };
  model::GeneratedEntity gen =
      model::generate_entity(m, g, walk, trie.max_path_len(), picker, dcfg.temperature);

  TurnGeneration out;
  out.entity = gen.tokens;
  out.entity_valid = trie.is_entity(gen.tokens);

  ad::NodeId h = g;
  if (!gen.tokens.empty()) {
    std::vector<ad::NodeId> tail;
    if (mcfg.logit_eval) {
      tail = model::logit_concat(m, gen.dists);
    } else {
      tail.reserve(gen.tokens.size());
      for (TokenId tok : gen.tokens) tail.push_back(m.embed(tok));
    }
    h = model::encode_from(m, g, tail).back();
  }
  out.response = decode_response(m, h, mcfg, dcfg, rng);
  return out;
}

std::vector<DialogPrediction> generate_corpus(const ModelParams& params,
                                              const Vocabulary& vocab, const EntityTrie& trie,
                                              const KnowledgeBase& kb,
                                              const std::vector<Dialog>& dialogs,
                                              const ModelConfig& mcfg,
                                              const DecodeConfig& dcfg) {
  std::vector<DialogPrediction> out;
  Rng root(mix_seed(dcfg.seed, 0xd0c0));
  uint64_t turn_counter = 0;
  for (size_t di = 0; di < dialogs.size(); ++di) {
    const Dialog& d = dialogs[di];
    DialogPrediction pred;
    pred.dialog_id = d.id;
    std::vector<model::TurnSample> samples =
        model::make_turn_samples(d, static_cast<int>(di), kb, vocab, mcfg.max_len);
    for (const model::TurnSample& s : samples) {
      Rng rng = root.fork(turn_counter++);
      TurnGeneration g = generate_turn(params, trie, s.input, mcfg, dcfg, rng);
      TurnPrediction tp;
      tp.has_entity = true;
      tp.entity_valid = g.entity_valid;
      TokenSeq entity = g.entity;
      if (!entity.empty() && entity.back() == Vocabulary::kEos) entity.pop_back();
      tp.entity = to_words(entity, vocab);
      tp.response = to_words(g.response, vocab);
      pred.turns.push_back(std::move(tp));
    }
    out.push_back(std::move(pred));
  }
  return out;
}

}  // namespace eco
