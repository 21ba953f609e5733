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

#ifndef ECO_MODEL_H_
#define ECO_MODEL_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eco/dialog.hpp"
#include "eco/kb.hpp"
#include "eco/tape.hpp"
#include "eco/trie.hpp"

namespace eco {

struct ModelConfig {
  int d_model = 32;
  int max_len = 256;           // encoder input cap, truncated from the left
  int max_response_len = 32;   // response decode cap
  double lr = 1e-3;
  double clip_norm = 1.0;
  double init_range = 0.08;
  int epochs = 30;
  int eval_every = 5;
  int batch_size = 8;
  int p = 3;  // augmentation rounds sample up to p entities per template
  uint64_t seed = 7;

  // Ablation switches.
  bool use_trie = true;          // constrain entity decoding to KB paths
  bool use_logit_concat = true;  // differentiable entity feed on unlabeled turns
  bool stop_grad_mix = true;     // keep the mix table out of the gradient
  bool logit_eval = false;       // feed distribution mixes at inference too
  enum class DataMode { kFull, kAuOnly, kTrOnly };
  DataMode data_mode = DataMode::kFull;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

struct GruParams {
  Mat wz, wr, wn;  // d x 2d, acting on [x; h]
  Mat bz, br, bn;  // d x 1
};

// One embedding table serves three roles: input embeddings, the output
// projection of both decoders, and the rows mixed by logit_concat. The
// encoder parameters are shared by every encoding pass.
struct ModelParams {
  int vocab_size = 0;
  int d_model = 0;
  Mat w_e;  // vocab_size x d_model, one row per token
  GruParams enc, dec_entity, dec_response;

  static ModelParams init(int vocab_size, int d_model, double init_range, uint64_t seed);

  // Stable name -> tensor enumeration for the optimizer and checkpoints.
  std::vector<std::pair<std::string, Mat*>> named();
  std::vector<std::pair<std::string, const Mat*>> named() const;
};

namespace model {

struct GruIds {
  ad::NodeId wz, wr, wn, bz, br, bn;
};

// Parameters materialized as leaves on one tape. Encoder leaves are bound
// once, so every encoding pass shares the same parameter nodes.
struct TapeModel {
  ad::Tape* tape = nullptr;
  int vocab_size = 0;
  int d_model = 0;
  ad::NodeId w_e = -1;
  GruIds enc, dec_entity, dec_response;
  ad::NodeId h0 = -1;  // shared zero initial state

  static TapeModel bind(ad::Tape& tape, const ModelParams& params, bool requires_grad);

  ad::NodeId embed(TokenId t) const;
  ad::NodeId gru_step(const GruIds& g, ad::NodeId x, ad::NodeId h) const;
  ad::NodeId logits(ad::NodeId h) const;  // w_e * h, tied projection
};

// Hidden states of the shared encoder over embedded inputs, starting from
// `h_init` (pass m.h0 for a fresh sequence). One hidden per input.
std::vector<ad::NodeId> encode_from(TapeModel& m, ad::NodeId h_init,
                                    const std::vector<ad::NodeId>& inputs);
std::vector<ad::NodeId> encode(TapeModel& m, const TokenSeq& tokens);

// Next-token distribution of the entity decoder after consuming `prefix`,
// conditioned on encoder state g.
ad::NodeId decode_entity_step(TapeModel& m, ad::NodeId g, const TokenSeq& prefix);

// Teacher-forced per-step distributions of a decoder over `target`
// (inputs are <bos> then target[0..n-2]).
std::vector<ad::NodeId> decoder_dists(TapeModel& m, const GruIds& dec, ad::NodeId h_init,
                                      const TokenSeq& target);

// Mean negative log-likelihood of `target` under per-step distributions.
ad::NodeId sequence_nll(ad::Tape& tape, const std::vector<ad::NodeId>& dists,
                        const TokenSeq& target);

// Entity supervision: mean NLL of the gold linearization under the entity
// decoder, unconstrained softmax (the trie plays no role in this loss).
ad::NodeId entity_loss(TapeModel& m, ad::NodeId g, const TokenSeq& gold_entity);

// Autoregressive entity decoding on the tape. With a trie, each step's
// distribution is restricted to the children of the decoded prefix and the
// walk must reach <eos> within the longest KB path. Without one, the raw
// distribution is used and decoding stops at <eos> or max_len.
// pick maps a probability vector to the chosen token (greedy by default).
struct GeneratedEntity {
  TokenSeq tokens;                  // includes final <eos> when reached
  std::vector<ad::NodeId> dists;    // the distribution each token was drawn from
  bool complete = false;            // saw <eos>
};
using TokenPicker = std::function<int(const Mat& dist)>;
GeneratedEntity generate_entity(TapeModel& m, ad::NodeId g, const EntityTrie* trie,
                                int max_len, const TokenPicker& pick = nullptr,
                                double temperature = 1.0);

// Differentiable entity feed: for each step distribution P, the vector
// P * W_e mixing embedding rows by probability. Gradients flow into the
// distributions (and through them into the entity decoder and encoder) but
// not into W_e, whose transpose enters as a constant. Disabling that stop
// exists only for tests.
std::vector<ad::NodeId> logit_concat(TapeModel& m, const std::vector<ad::NodeId>& dists,
                                     bool stop_gradient = true);

// Entity-conditioned encoding: the encoder continues over the entity
// segment, fed either as tokens (embedded ids) or as precomputed vectors.
// Exactly one of the two may be set.
struct EntityFeed {
  const TokenSeq* tokens = nullptr;
  const std::vector<ad::NodeId>* vectors = nullptr;
};
std::vector<ad::NodeId> encode_with_entity(TapeModel& m, const TokenSeq& input,
                                           const EntityFeed& entity);

// Mean NLL of the gold response (terminated by <eos>) under the response
// decoder initialized from h.
ad::NodeId response_loss(TapeModel& m, ad::NodeId h, const TokenSeq& response_with_eos);

// One encoder input per dialog turn plus its targets.
struct TurnSample {
  TokenSeq input;     // <bos> (user <eos> response <eos>)* user <eos>
  TokenSeq response;  // gold response tokens + <eos>
  std::optional<TokenSeq> entity;  // gold linearization, labeled turns only
  int dialog_index = -1;
  int turn_index = -1;
};

std::vector<TurnSample> make_turn_samples(const Dialog& d, int dialog_index,
                                          const KnowledgeBase& kb, const Vocabulary& vocab,
                                          int max_len, int* truncated = nullptr);

// Joint objective for one turn. Labeled turns contribute entity loss plus
// response loss conditioned on the gold entity tokens. Unlabeled turns
// generate an entity and condition the response on it through
// logit_concat (or on the raw generated tokens when that is disabled).
struct TurnLoss {
  ad::NodeId total = -1;
  ad::NodeId response_nll = -1;
  std::optional<ad::NodeId> entity_nll;
};
TurnLoss turn_loss(TapeModel& m, const TurnSample& s, const EntityTrie* trie,
                   const ModelConfig& cfg);

// Sum of turn losses over a batch.
ad::NodeId joint_loss(TapeModel& m, const std::vector<const TurnSample*>& batch,
                      const EntityTrie* trie, const ModelConfig& cfg);

}  // namespace model

struct Checkpoint {
  ModelParams params;
  ModelConfig config;
  std::vector<std::string> vocab_words;
  uint64_t kb_fingerprint = 0;
};

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const ModelConfig& config, const Vocabulary& vocab,
                     uint64_t kb_fingerprint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace eco

#endif  // ECO_MODEL_H_
