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

#include "eco/model.hpp"

#include <algorithm>

#include "eco/jsonio.hpp"
#include "eco/rng.hpp"

namespace eco {

nlohmann::json ModelConfig::to_json() const {
  const char* mode = data_mode == DataMode::kFull    ? "full"
                     : data_mode == DataMode::kAuOnly ? "au_only"
                                                      : "tr_only";
  return nlohmann::json{{"d_model", d_model},
                        {"max_len", max_len},
                        {"max_response_len", max_response_len},
                        {"lr", lr},
                        {"clip_norm", clip_norm},
                        {"init_range", init_range},
                        {"epochs", epochs},
                        {"eval_every", eval_every},
                        {"batch_size", batch_size},
                        {"p", p},
                        {"seed", seed},
                        {"use_trie", use_trie},
                        {"use_logit_concat", use_logit_concat},
                        {"stop_grad_mix", stop_grad_mix},
                        {"logit_eval", logit_eval},
                        {"data_mode", mode}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.d_model = j.value("d_model", c.d_model);
  c.max_len = j.value("max_len", c.max_len);
  c.max_response_len = j.value("max_response_len", c.max_response_len);
  c.lr = j.value("lr", c.lr);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.init_range = j.value("init_range", c.init_range);
  c.epochs = j.value("epochs", c.epochs);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.p = j.value("p", c.p);
  c.seed = j.value("seed", c.seed);
  c.use_trie = j.value("use_trie", c.use_trie);
  c.use_logit_concat = j.value("use_logit_concat", c.use_logit_concat);
  c.stop_grad_mix = j.value("stop_grad_mix", c.stop_grad_mix);
  c.logit_eval = j.value("logit_eval", c.logit_eval);
  const std::string mode = j.value("data_mode", std::string("full"));
  if (mode == "full") {
    c.data_mode = DataMode::kFull;
  } else if (mode == "au_only") {
    c.data_mode = DataMode::kAuOnly;
  } else if (mode == "tr_only") {
    c.data_mode = DataMode::kTrOnly;
  } else {
    throw Error("unknown data_mode '" + mode + "'");
  }
  ECO_CHECK(c.d_model > 0 && c.max_len > 1 && c.epochs >= 0 && c.batch_size > 0 && c.p >= 0,
            "model config out of range");
  return c;
}

ModelParams ModelParams::init(int vocab_size, int d_model, double init_range, uint64_t seed) {
  ECO_CHECK(vocab_size > 0 && d_model > 0, "model: empty vocabulary or zero width");
  Rng rng(mix_seed(seed, 0x9a2f));
  ModelParams p;
  p.vocab_size = vocab_size;
  p.d_model = d_model;
  p.w_e = Mat::uniform(vocab_size, d_model, -init_range, init_range, rng);
  auto make_gru = [&] {
    GruParams g;
    g.wz = Mat::uniform(d_model, 2 * d_model, -init_range, init_range, rng);
    g.wr = Mat::uniform(d_model, 2 * d_model, -init_range, init_range, rng);
    g.wn = Mat::uniform(d_model, 2 * d_model, -init_range, init_range, rng);
    g.bz = Mat::uniform(d_model, 1, -init_range, init_range, rng);
    g.br = Mat::uniform(d_model, 1, -init_range, init_range, rng);
    g.bn = Mat::uniform(d_model, 1, -init_range, init_range, rng);
    return g;
  };
  p.enc = make_gru();
  p.dec_entity = make_gru();
  p.dec_response = make_gru();
  return p;
}

std::vector<std::pair<std::string, Mat*>> ModelParams::named() {
  std::vector<std::pair<std::string, Mat*>> out{{"w_e", &w_e}};
  auto add = [&](const std::string& prefix, GruParams& g) {
    out.emplace_back(prefix + ".wz", &g.wz);
    out.emplace_back(prefix + ".wr", &g.wr);
    out.emplace_back(prefix + ".wn", &g.wn);
    out.emplace_back(prefix + ".bz", &g.bz);
    out.emplace_back(prefix + ".br", &g.br);
    out.emplace_back(prefix + ".bn", &g.bn);
  };
  add("enc", enc);
  add("dec_entity", dec_entity);
  add("dec_response", dec_response);
  return out;
}

std::vector<std::pair<std::string, const Mat*>> ModelParams::named() const {
  std::vector<std::pair<std::string, const Mat*>> out;
  for (auto& [name, mat] : const_cast<ModelParams*>(this)->named()) out.emplace_back(name, mat);
  return out;
}

namespace model {

TapeModel TapeModel::bind(ad::Tape& tape, const ModelParams& params, bool requires_grad) {
  TapeModel m;
  m.tape = &tape;
  m.vocab_size = params.vocab_size;
  m.d_model = params.d_model;
  m.w_e = tape.leaf(params.w_e, requires_grad);
  auto bind_gru = [&](const GruParams& g) {
    return GruIds{tape.leaf(g.wz, requires_grad), tape.leaf(g.wr, requires_grad),
                  tape.leaf(g.wn, requires_grad), tape.leaf(g.bz, requires_grad),
                  tape.leaf(g.br, requires_grad), tape.leaf(g.bn, requires_grad)};
  };
  m.enc = bind_gru(params.enc);
  m.dec_entity = bind_gru(params.dec_entity);
  m.dec_response = bind_gru(params.dec_response);
  m.h0 = tape.leaf(Mat::zeros(params.d_model, 1), false);
  return m;
}

ad::NodeId TapeModel::embed(TokenId t) const {
  ECO_CHECK(t >= 0 && t < vocab_size, "embed: token id " << t << " out of range");
  return tape->take_row(w_e, t);
}

ad::NodeId TapeModel::gru_step(const GruIds& g, ad::NodeId x, ad::NodeId h) const {
  ad::Tape& t = *tape;
  const ad::NodeId xh = t.concat(x, h);
  const ad::NodeId z = t.sigmoid(t.add(t.matvec(g.wz, xh), g.bz));
  const ad::NodeId r = t.sigmoid(t.add(t.matvec(g.wr, xh), g.br));
  const ad::NodeId xrh = t.concat(x, t.mul(r, h));
  const ad::NodeId n = t.tanh(t.add(t.matvec(g.wn, xrh), g.bn));
  // (1 - z) * h + z * n, written as h + z * (n - h).
  return t.add(h, t.mul(z, t.sub(n, h)));
}

ad::NodeId TapeModel::logits(ad::NodeId h) const { return tape->matvec(w_e, h); }

std::vector<ad::NodeId> encode_from(TapeModel& m, ad::NodeId h_init,
                                    const std::vector<ad::NodeId>& inputs) {
  std::vector<ad::NodeId> hs;
  hs.reserve(inputs.size());
  ad::NodeId h = h_init;
  for (ad::NodeId x : inputs) {
    h = m.gru_step(m.enc, x, h);
    hs.push_back(h);
  }
  return hs;
}

std::vector<ad::NodeId> encode(TapeModel& m, const TokenSeq& tokens) {
  ECO_CHECK(!tokens.empty(), "encode: empty input");
  std::vector<ad::NodeId> xs;
  xs.reserve(tokens.size());
  for (TokenId t : tokens) xs.push_back(m.embed(t));
  return encode_from(m, m.h0, xs);
}

std::vector<ad::NodeId> decoder_dists(TapeModel& m, const GruIds& dec, ad::NodeId h_init,
                                      const TokenSeq& target) {
  ECO_CHECK(!target.empty(), "decoder_dists: empty target");
  std::vector<ad::NodeId> dists;
  dists.reserve(target.size());
  ad::NodeId h = h_init;
  TokenId prev = Vocabulary::kBos;
  for (TokenId t : target) {
    h = m.gru_step(dec, m.embed(prev), h);
    dists.push_back(m.tape->softmax(m.logits(h)));
    prev = t;
  }
  return dists;
}

ad::NodeId decode_entity_step(TapeModel& m, ad::NodeId g, const TokenSeq& prefix) {
  ad::NodeId h = g;
  TokenId prev = Vocabulary::kBos;
  for (TokenId t : prefix) {
    h = m.gru_step(m.dec_entity, m.embed(prev), h);
    prev = t;
  }
  h = m.gru_step(m.dec_entity, m.embed(prev), h);
  return m.tape->softmax(m.logits(h));
}

ad::NodeId sequence_nll(ad::Tape& tape, const std::vector<ad::NodeId>& dists,
                        const TokenSeq& target) {
  ECO_CHECK(!target.empty() && dists.size() == target.size(),
            "sequence_nll: " << dists.size() << " distributions vs " << target.size()
                             << " target tokens");
  ad::NodeId acc = -1;
  for (size_t i = 0; i < target.size(); ++i) {
    ad::NodeId nll = tape.neg_log_pick(dists[i], target[i]);
    acc = (acc < 0) ? nll : tape.add(acc, nll);
  }
  return tape.scale(acc, 1.0 / static_cast<double>(target.size()));
}

ad::NodeId entity_loss(TapeModel& m, ad::NodeId g, const TokenSeq& gold_entity) {
  return sequence_nll(*m.tape, decoder_dists(m, m.dec_entity, g, gold_entity), gold_entity);
}

GeneratedEntity generate_entity(TapeModel& m, ad::NodeId g, const EntityTrie* trie,
                                int max_len, const TokenPicker& pick, double temperature) {
  ECO_CHECK(max_len > 0, "generate_entity: max_len must be positive");
  ECO_CHECK(temperature > 0.0, "generate_entity: temperature must be positive");
  GeneratedEntity out;
  ad::Tape& t = *m.tape;
  ad::NodeId h = g;
  TokenId prev = Vocabulary::kBos;
  while (true) {
    h = m.gru_step(m.dec_entity, m.embed(prev), h);
    ad::NodeId logits = m.logits(h);
    if (temperature != 1.0) logits = t.scale(logits, 1.0 / temperature);
    ad::NodeId dist = t.softmax(logits);
    if (trie != nullptr) {
      dist = t.renorm_masked(dist, trie->allowed_tokens(out.tokens));
    }
    const int tok = pick ? pick(t.val(dist)) : argmax_lowest(t.val(dist));
    ECO_CHECK(tok >= 0 && tok < m.vocab_size, "generate_entity: picked token out of range");
    out.dists.push_back(dist);
    out.tokens.push_back(tok);
    if (tok == Vocabulary::kEos) {
      out.complete = true;
      break;
    }
    if (static_cast<int>(out.tokens.size()) >= max_len) {
      // A trie walk always reaches <eos> within the longest stored path;
      // running past it means the trie and decoder disagree.
      ECO_CHECK(trie == nullptr, "generate_entity: constrained walk exceeded " << max_len
                                                                               << " tokens");
      break;
    }
    prev = tok;
  }
  return out;
}

std::vector<ad::NodeId> logit_concat(TapeModel& m, const std::vector<ad::NodeId>& dists,
                                     bool stop_gradient) {
  ad::Tape& t = *m.tape;
  const ad::NodeId table = stop_gradient ? t.stop_grad(m.w_e) : m.w_e;
  std::vector<ad::NodeId> out;
  out.reserve(dists.size());
  for (ad::NodeId d : dists) out.push_back(t.matvec_t(table, d));
  return out;
}

std::vector<ad::NodeId> encode_with_entity(TapeModel& m, const TokenSeq& input,
                                           const EntityFeed& entity) {
  ECO_CHECK((entity.tokens != nullptr) != (entity.vectors != nullptr),
            "encode_with_entity: exactly one entity form must be given");
  std::vector<ad::NodeId> hs = encode(m, input);
  std::vector<ad::NodeId> tail;
  if (entity.tokens != nullptr) {
    tail.reserve(entity.tokens->size());
    for (TokenId t : *entity.tokens) tail.push_back(m.embed(t));
  } else {
    tail = *entity.vectors;
  }
  std::vector<ad::NodeId> hs2 = encode_from(m, hs.back(), tail);
  hs.insert(hs.end(), hs2.begin(), hs2.end());
  return hs;
}

ad::NodeId response_loss(TapeModel& m, ad::NodeId h, const TokenSeq& response_with_eos) {
  ECO_CHECK(!response_with_eos.empty() && response_with_eos.back() == Vocabulary::kEos,
            "response_loss: target must end with <eos>");
  return sequence_nll(*m.tape, decoder_dists(m, m.dec_response, h, response_with_eos),
                      response_with_eos);
}

std::vector<TurnSample> make_turn_samples(const Dialog& d, int dialog_index,
                                          const KnowledgeBase& kb, const Vocabulary& vocab,
                                          int max_len, int* truncated) {
  std::vector<TurnSample> out;
  TokenSeq context;  // accumulated (user <eos> response <eos>)*
  for (size_t ti = 0; ti < d.turns.size(); ++ti) {
    const DialogTurn& t = d.turns[ti];
    TurnSample s;
    s.dialog_index = dialog_index;
    s.turn_index = static_cast<int>(ti);

    TokenSeq input{Vocabulary::kBos};
    input.insert(input.end(), context.begin(), context.end());
    TokenSeq user = to_ids(t.user, vocab);
    input.insert(input.end(), user.begin(), user.end());
    input.push_back(Vocabulary::kEos);
    if (static_cast<int>(input.size()) > max_len) {
      // Keep the most recent tokens; the leading <bos> survives.
      TokenSeq cut{Vocabulary::kBos};
      cut.insert(cut.end(), input.end() - (max_len - 1), input.end());
      input = std::move(cut);
      if (truncated) ++*truncated;
    }
    s.input = std::move(input);

    s.response = to_ids(t.response, vocab);
    s.response.push_back(Vocabulary::kEos);

    if (t.gold_entity) {
      s.entity = linearize_entity(kb.entity(*t.gold_entity), kb.schema(), vocab);
    }
    out.push_back(std::move(s));

    context.insert(context.end(), user.begin(), user.end());
    context.push_back(Vocabulary::kEos);
    TokenSeq resp = to_ids(t.response, vocab);
    context.insert(context.end(), resp.begin(), resp.end());
    context.push_back(Vocabulary::kEos);
  }
  return out;
}

TurnLoss turn_loss(TapeModel& m, const TurnSample& s, const EntityTrie* trie,
                   const ModelConfig& cfg) {
  ad::Tape& t = *m.tape;
  TurnLoss out;
  std::vector<ad::NodeId> hs = encode(m, s.input);
  const ad::NodeId g = hs.back();

  if (s.entity) {
    // Labeled turn: supervise the entity decoder and condition the
    // response on the gold entity tokens.
    out.entity_nll = entity_loss(m, g, *s.entity);
    std::vector<ad::NodeId> tail;
    tail.reserve(s.entity->size());
    for (TokenId tok : *s.entity) tail.push_back(m.embed(tok));
    const ad::NodeId h = encode_from(m, g, tail).back();
    out.response_nll = response_loss(m, h, s.response);
    out.total = t.add(*out.entity_nll, out.response_nll);
    return out;
  }

  // Unlabeled turn: the entity is generated, not given.
  const EntityTrie* walk = cfg.use_trie ? trie : nullptr;
  const int cap = trie != nullptr ? trie->max_path_len() : cfg.max_len;
  GeneratedEntity gen = generate_entity(m, g, walk, cap);
  std::vector<ad::NodeId> tail;
  if (cfg.use_logit_concat) {
    tail = logit_concat(m, gen.dists, cfg.stop_grad_mix);
  } else {
    // Generated ids enter as plain tokens; no gradient reaches the entity
    // decoder through them.
    tail.reserve(gen.tokens.size());
    for (TokenId tok : gen.tokens) tail.push_back(m.embed(tok));
  }
  const ad::NodeId h = tail.empty() ? g : encode_from(m, g, tail).back();
  out.response_nll = response_loss(m, h, s.response);
  out.total = out.response_nll;
  return out;
}

ad::NodeId joint_loss(TapeModel& m, const std::vector<const TurnSample*>& batch,
                      const EntityTrie* trie, const ModelConfig& cfg) {
  ECO_CHECK(!batch.empty(), "joint_loss: empty batch");
  ad::NodeId acc = -1;
  for (const TurnSample* s : batch) {
    TurnLoss tl = turn_loss(m, *s, trie, cfg);
    acc = (acc < 0) ? tl.total : m.tape->add(acc, tl.total);
  }
  return acc;
}

}  // namespace model

namespace {

nlohmann::json mat_to_json(const Mat& m) {
  return nlohmann::json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

Mat mat_from_json(const nlohmann::json& j) {
  Mat m(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& data = j.at("data");
  ECO_CHECK(data.size() == m.size(), "checkpoint tensor size mismatch");
  for (size_t i = 0; i < m.size(); ++i) m.a[i] = data[i].get<double>();
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const ModelConfig& config, const Vocabulary& vocab,
                     uint64_t kb_fingerprint) {
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, mat] : params.named()) tensors[name] = mat_to_json(*mat);
  nlohmann::json j{{"version", 1},
                   {"config", config.to_json()},
                   {"vocab", vocab.words()},
                   {"kb_fingerprint", kb_fingerprint},
                   {"vocab_size", params.vocab_size},
                   {"d_model", params.d_model},
                   {"tensors", std::move(tensors)}};
  write_json_file(path, j);
}

Checkpoint load_checkpoint(const std::string& path) {
  nlohmann::json j = read_json_file(path);
  ECO_CHECK(j.value("version", 0) == 1, "unsupported checkpoint version in " << path);
  Checkpoint c;
  c.config = ModelConfig::from_json(j.at("config"));
  c.vocab_words = j.at("vocab").get<std::vector<std::string>>();
  c.kb_fingerprint = j.at("kb_fingerprint").get<uint64_t>();
  c.params.vocab_size = j.at("vocab_size").get<int>();
  c.params.d_model = j.at("d_model").get<int>();
  const nlohmann::json& tensors = j.at("tensors");
  for (auto& [name, mat] : c.params.named()) {
    ECO_CHECK(tensors.contains(name), "checkpoint is missing tensor '" << name << "'");
    *mat = mat_from_json(tensors[name]);
  }
  ECO_CHECK(c.params.w_e.rows == c.params.vocab_size &&
                c.params.w_e.cols == c.params.d_model &&
                static_cast<int>(c.vocab_words.size()) == c.params.vocab_size,
            "checkpoint shapes are inconsistent");
  return c;
}

}  // namespace eco
