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

#include "eco/train.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>

namespace eco {

namespace {

// Distinct stream labels so epoch augmentation, shuffling, and parameter
// init never share a raw seed.
constexpr uint64_t kAugmentStream = 1000;
constexpr uint64_t kShuffleStream = 2000;

std::vector<model::TurnSample> epoch_samples(const std::vector<Dialog>& d_tr,
                                             const std::vector<Template>& templates,
                                             const KnowledgeBase& kb, const Vocabulary& vocab,
                                             const ModelConfig& cfg, int epoch) {
  std::vector<Dialog> d_au;
  if (cfg.data_mode != ModelConfig::DataMode::kTrOnly && cfg.p > 0) {
    d_au = augment_batch(templates, kb, cfg.p, mix_seed(cfg.seed, kAugmentStream + epoch));
  }
  std::vector<model::TurnSample> samples;
  int index = 0;
  if (cfg.data_mode != ModelConfig::DataMode::kAuOnly) {
    for (const Dialog& d : d_tr) {
      auto s = model::make_turn_samples(d, index++, kb, vocab, cfg.max_len);
      samples.insert(samples.end(), s.begin(), s.end());
    }
  }
  for (const Dialog& d : d_au) {
    auto s = model::make_turn_samples(d, index++, kb, vocab, cfg.max_len);
    samples.insert(samples.end(), s.begin(), s.end());
  }
  ECO_CHECK(!samples.empty(), "train: no samples for epoch " << epoch
                                                             << " (check data_mode and p)");
  return samples;
}

double forward_avg_loss(const ModelParams& params, const std::vector<model::TurnSample>& samples,
                        const EntityTrie& trie, const ModelConfig& cfg) {
  double total = 0.0;
  for (const model::TurnSample& s : samples) {
    ad::Tape tape;
    model::TapeModel m = model::TapeModel::bind(tape, params, /*requires_grad=*/false);
    model::TurnLoss tl = model::turn_loss(m, s, &trie, cfg);
    total += tape.scalar(tl.total);
  }
  return total / static_cast<double>(samples.size());
}

}  // namespace

void adam_step(ModelParams& params, const std::map<std::string, Mat>& grads,
               AdamState& state, double lr, double clip_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads) {
    for (double x : g.a) sq += x * x;
  }
  const double norm = std::sqrt(sq);
  const double scale = (clip_norm > 0.0 && norm > clip_norm) ? clip_norm / norm : 1.0;

  ++state.t;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (auto& [name, mat] : params.named()) {
    auto git = grads.find(name);
    ECO_CHECK(git != grads.end(), "adam: missing gradient for '" << name << "'");
    const Mat& g = git->second;
    ECO_CHECK(g.same_shape(*mat), "adam: gradient shape mismatch for '" << name << "'");
    Mat& m = state.m.try_emplace(name, Mat::zeros(mat->rows, mat->cols)).first->second;
    Mat& v = state.v.try_emplace(name, Mat::zeros(mat->rows, mat->cols)).first->second;
    for (size_t i = 0; i < mat->size(); ++i) {
      const double gi = g.a[i] * scale;
      m.a[i] = state.beta1 * m.a[i] + (1.0 - state.beta1) * gi;
      v.a[i] = state.beta2 * v.a[i] + (1.0 - state.beta2) * gi * gi;
      const double mhat = m.a[i] / bc1;
      const double vhat = v.a[i] / bc2;
      mat->a[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

nlohmann::json TrainResult::log_json() const {
  nlohmann::json ep = nlohmann::json::array();
  for (const EpochStats& e : epochs) {
    ep.push_back(nlohmann::json{{"epoch", e.epoch},
                                {"avg_turn_loss", e.avg_turn_loss},
                                {"turns", e.turns},
                                {"labeled_turns", e.labeled_turns}});
  }
  nlohmann::json ev = nlohmann::json::array();
  for (const EvalPoint& p : evals) {
    ev.push_back(nlohmann::json{{"epoch", p.epoch},
                                {"dev_score", p.dev_score},
                                {"checkpoint", p.checkpoint_path}});
  }
  return nlohmann::json{{"version", 1},
                        {"initial_avg_loss", initial_avg_loss},
                        {"final_avg_loss", final_avg_loss},
                        {"best_epoch", best_epoch},
                        {"best_dev_score", best_dev_score},
                        {"epochs", std::move(ep)},
                        {"evals", std::move(ev)}};
}

TrainResult train(const std::vector<Dialog>& d_tr, const std::vector<Template>& templates,
                  const KnowledgeBase& kb, const EntityTrie& trie, const Vocabulary& vocab,
                  const ModelConfig& cfg, const std::string& ckpt_dir,
                  const DevEvaluator& dev_eval, std::ostream* log) {
  ECO_CHECK(kb.fingerprint() == trie.source_kb_hash(),
            "train: the trie was built from a different knowledge base");
  TrainResult result;
  ModelParams params =
      ModelParams::init(vocab.size(), cfg.d_model, cfg.init_range, cfg.seed);
  AdamState adam;

  {
    auto first = epoch_samples(d_tr, templates, kb, vocab, cfg, 1);
    result.initial_avg_loss = forward_avg_loss(params, first, trie, cfg);
    if (log) *log << "initial avg turn loss " << result.initial_avg_loss << "\n";
  }

  bool have_best = false;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<model::TurnSample> samples = epoch_samples(d_tr, templates, kb, vocab, cfg, epoch);
    std::vector<int> order(samples.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    Rng shuffle_rng(mix_seed(cfg.seed, kShuffleStream + epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    int labeled = 0;
    for (const model::TurnSample& s : samples) labeled += s.entity ? 1 : 0;

    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::vector<const model::TurnSample*> batch;
      for (size_t i = start; i < order.size() && i < start + cfg.batch_size; ++i) {
        batch.push_back(&samples[order[i]]);
      }
      ad::Tape tape;
      model::TapeModel m = model::TapeModel::bind(tape, params, /*requires_grad=*/true);
      ad::NodeId loss = model::joint_loss(m, batch, &trie, cfg);
      const double loss_val = tape.scalar(loss);
      ECO_CHECK(std::isfinite(loss_val),
                "train: non-finite loss at epoch " << epoch << " batch " << start / cfg.batch_size
                                                   << "; aborting with diagnostics: batch size "
                                                   << batch.size() << ", adam steps " << adam.t);
      tape.backward(loss);

      std::map<std::string, Mat> grads;
      const ad::NodeId ids[] = {m.w_e,
                                m.enc.wz, m.enc.wr, m.enc.wn, m.enc.bz, m.enc.br, m.enc.bn,
                                m.dec_entity.wz, m.dec_entity.wr, m.dec_entity.wn,
                                m.dec_entity.bz, m.dec_entity.br, m.dec_entity.bn,
                                m.dec_response.wz, m.dec_response.wr, m.dec_response.wn,
                                m.dec_response.bz, m.dec_response.br, m.dec_response.bn};
      size_t k = 0;
      for (const auto& [name, mat] : params.named()) {
        const Mat& g = tape.grad(ids[k++]);
        ECO_CHECK(!has_nan(g), "train: non-finite gradient for '" << name << "' at epoch "
                                                                  << epoch);
        grads[name] = g;
      }
      adam_step(params, grads, adam, cfg.lr, cfg.clip_norm);
      epoch_loss += loss_val;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.turns = static_cast<int>(samples.size());
    stats.labeled_turns = labeled;
    stats.avg_turn_loss = epoch_loss / static_cast<double>(samples.size());
    result.epochs.push_back(stats);
    if (log) {
      *log << "epoch " << epoch << " avg turn loss " << stats.avg_turn_loss << " over "
           << stats.turns << " turns (" << labeled << " labeled)\n";
    }

    const bool eval_now =
        dev_eval && (epoch % cfg.eval_every == 0 || epoch == cfg.epochs);
    if (eval_now) {
      EvalPoint point;
      point.epoch = epoch;
      point.dev_score = dev_eval(params, epoch);
      if (!ckpt_dir.empty()) {
        std::filesystem::create_directories(ckpt_dir);
        point.checkpoint_path =
            ckpt_dir + "/ckpt-epoch-" + std::to_string(epoch) + ".json";
        save_checkpoint(point.checkpoint_path, params, cfg, vocab, kb.fingerprint());
      }
      result.evals.push_back(point);
      if (log) *log << "epoch " << epoch << " dev score " << point.dev_score << "\n";
      if (!have_best || point.dev_score > result.best_dev_score) {
        have_best = true;
        result.best_dev_score = point.dev_score;
        result.best_epoch = epoch;
        result.best_params = params;
      }
    }
  }

  result.final_params = params;
  result.final_avg_loss = result.epochs.empty() ? result.initial_avg_loss
                                                : result.epochs.back().avg_turn_loss;
  if (!have_best) {
    result.best_params = params;
    result.best_epoch = cfg.epochs;
  }
  return result;
}

}  // namespace eco
