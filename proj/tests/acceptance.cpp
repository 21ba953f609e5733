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

// Acceptance gate for the whole pipeline. Each numbered check prints one
// [PASS]/[FAIL] line; the binary exits nonzero if any check fails. The
// tolerances are pinned here on purpose: loosening them is a behavior
// change, not a test fix.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eco/augment.hpp"
#include "eco/generate.hpp"
#include "eco/metrics.hpp"
#include "eco/pipeline.hpp"
#include "eco/synth.hpp"

namespace {

using eco::KnowledgeBase;
using eco::Mat;
using eco::ModelConfig;
using eco::ModelParams;
using eco::Rng;
using eco::Vocabulary;
using eco::Words;
using eco::ad::NodeId;
using eco::ad::Tape;
namespace model = eco::model;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Words> words(std::initializer_list<const char*> texts) {
  std::vector<Words> out;
  for (const char* t : texts) out.push_back(eco::split_words(t));
  return out;
}

// The reference synthetic corpus every trained check runs on.
eco::SyntheticCorpus reference_corpus() {
  eco::SyntheticSpec spec;
  spec.entities = 20;
  spec.attributes = 4;
  spec.value_pool = 5;
  spec.train_dialogs = 200;
  spec.dev_dialogs = 20;
  spec.test_dialogs = 20;
  spec.seed = 7;
  return eco::synth_corpus(spec);
}

// ---------------------------------------------------------------------
// 1. Constrained decoding validity: 10,000 decodes, all must be KB paths.
bool check_trie_validity(std::ostream& log) {
  auto t0 = std::chrono::steady_clock::now();
  eco::SyntheticSpec spec;
  spec.entities = 100;
  spec.attributes = 4;
  spec.value_pool = 5;
  spec.train_dialogs = 1;
  spec.dev_dialogs = 1;
  spec.test_dialogs = 1;
  spec.seed = 11;
  eco::SyntheticCorpus corpus = eco::synth_corpus(spec);
  Vocabulary vocab = Vocabulary::build(corpus.kb, {});
  eco::EntityTrie trie = eco::EntityTrie::build(corpus.kb, vocab);
  ModelParams params = ModelParams::init(vocab.size(), 16, 0.08, 1);

  Rng root(321);
  int valid = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    Tape tape;
    auto m = model::TapeModel::bind(tape, params, false);
    eco::TokenSeq input = {Vocabulary::kBos,
                           static_cast<eco::TokenId>(4 + (i % (vocab.size() - 4))),
                           Vocabulary::kEos};
    NodeId g = model::encode(m, input).back();
    Rng pick_rng = root.fork(static_cast<uint64_t>(i));
    // top-5 sampling spreads the decodes over many different paths
    auto picker = [&](const Mat& dist) {
      eco::DecodeConfig dc;
      dc.mode = eco::DecodeConfig::Mode::kTopK;
      dc.top_k = 5;
      return eco::pick_token(dist, dc, pick_rng);
    };
    auto gen = model::generate_entity(m, g, &trie, trie.max_path_len(), picker);
    valid += gen.complete && trie.is_entity(gen.tokens);
  }
  double dt = seconds_since(t0);
  log << valid << "/" << n << " valid linearizations over a " << corpus.kb.size()
      << "-entity kb in " << dt << "s";
  return valid == n && dt < 30.0;
}

// ---------------------------------------------------------------------
// 2. Renormalization properties over 1,000 random distributions.
bool check_renormalization(std::ostream& log) {
  Rng rng(55);
  double worst_sum = 0.0, worst_ratio = 0.0;
  for (int iter = 0; iter < 1000; ++iter) {
    const int n = 2 + static_cast<int>(rng.uniform_int(63));
    Mat dist(n, 1);
    double z = 0.0;
    for (double& x : dist.a) z += (x = 0.05 + rng.uniform());
    for (double& x : dist.a) x /= z;
    std::vector<int> allowed;
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() < 0.4) allowed.push_back(i);
    }
    if (allowed.empty()) allowed.push_back(static_cast<int>(rng.uniform_int(n)));

    Tape tape;
    const Mat& out = tape.val(tape.renorm_masked(tape.leaf(dist, false), allowed));

    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += out.a[i];
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));

    size_t ai = 0;
    for (int i = 0; i < n; ++i) {
      const bool in = ai < allowed.size() && allowed[ai] == i;
      if (in) {
        ai++;
      } else if (out.a[i] != 0.0) {
        log << "mass outside the allowed set at index " << i;
        return false;
      }
    }
    // cross products compare out_i/out_j with dist_i/dist_j divisions-free
    for (size_t a = 0; a + 1 < allowed.size(); ++a) {
      int i = allowed[a], j = allowed[a + 1];
      double lhs = out.a[i] * dist.a[j], rhs = dist.a[i] * out.a[j];
      worst_ratio = std::max(worst_ratio, std::abs(lhs - rhs) / std::max(lhs, rhs));
    }
  }
  log << "max |sum-1| " << worst_sum << ", max ratio drift " << worst_ratio;
  return worst_sum <= 1e-6 && worst_ratio <= 1e-9;
}

// ---------------------------------------------------------------------
// 3. Reverse-mode gradients vs central finite differences on the joint
//    loss of a small model (every parameter, step 1e-5). The mix-table
//    gradient stop is disabled here so the defined gradient equals the
//    true derivative the differences measure; check 4 covers the stop.
bool check_gradients(std::ostream& log) {
  auto t0 = std::chrono::steady_clock::now();
  eco::AttributeSchema schema{{"name", "area", "food", "price"}};
  std::vector<eco::Entity> es;
  auto ent = [&](int id, std::string n, std::string a, std::string f, std::string p) {
    eco::Entity e;
    e.id = id;
    e.values = {{"name", n}, {"area", a}, {"food", f}, {"price", p}};
    es.push_back(e);
  };
  ent(0, "golden palace", "north", "italian", "cheap");
  ent(1, "silver garden", "south", "north american", "moderate");
  ent(2, "gourmet kitchen", "north", "north american", "expensive");
  KnowledgeBase kb(schema, std::move(es));
  Vocabulary vocab = Vocabulary::build(
      kb, {"i am looking for italian food", "you could try golden palace",
           "what is the price of golden palace", "golden palace has cheap price"});
  if (vocab.size() > 50) {
    log << "fixture vocabulary too large: " << vocab.size();
    return false;
  }
  eco::EntityTrie trie = eco::EntityTrie::build(kb, vocab);

  eco::Dialog d;
  d.id = "gc";
  d.domain = "eatery";
  d.goal.constraints = {{"food", "italian"}};
  eco::DialogTurn t1;
  t1.user = eco::split_words("i am looking for italian food");
  t1.response = eco::split_words("you could try golden palace");
  t1.gold_entity = 0;
  d.turns.push_back(t1);
  eco::DialogTurn t2;
  t2.user = eco::split_words("what is the price of golden palace");
  t2.response = eco::split_words("golden palace has cheap price");
  d.turns.push_back(t2);

  ModelConfig cfg;
  cfg.d_model = 16;
  cfg.max_len = 64;
  cfg.stop_grad_mix = false;
  ModelParams params = ModelParams::init(vocab.size(), cfg.d_model, 0.08, 11);
  auto samples = model::make_turn_samples(d, 0, kb, vocab, cfg.max_len);
  std::vector<const model::TurnSample*> batch;
  for (const auto& s : samples) batch.push_back(&s);

  auto forward = [&](const ModelParams& p) {
    Tape tape;
    auto m = model::TapeModel::bind(tape, p, false);
    return tape.scalar(model::joint_loss(m, batch, &trie, cfg));
  };

  Tape tape;
  auto m = model::TapeModel::bind(tape, params, true);
  tape.backward(model::joint_loss(m, batch, &trie, cfg));
  std::vector<NodeId> ids{m.w_e};
  for (const auto& g : {m.enc, m.dec_entity, m.dec_response}) {
    for (NodeId id : {g.wz, g.wr, g.wn, g.bz, g.br, g.bn}) ids.push_back(id);
  }
  auto named = params.named();

  const double h = 1e-5;
  double max_err = 0.0;
  long long checked = 0;
  for (size_t k = 0; k < named.size(); ++k) {
    const Mat& grad = tape.grad(ids[k]);
    for (size_t i = 0; i < named[k].second->size(); ++i) {
      ModelParams pp = params;
      pp.named()[k].second->a[i] += h;
      ModelParams pm = params;
      pm.named()[k].second->a[i] -= h;
      double fd = (forward(pp) - forward(pm)) / (2.0 * h);
      double err =
          std::abs(grad.a[i] - fd) / std::max({std::abs(grad.a[i]), std::abs(fd), 1e-3});
      max_err = std::max(max_err, err);
      checked++;
    }
  }
  double dt = seconds_since(t0);
  log << checked << " parameters, max relative error " << max_err << " in " << dt << "s";
  return max_err < 1e-4 && dt < 120.0;
}

// ---------------------------------------------------------------------
// 4. The mix product must not leak gradient into the embedding table.
bool check_stop_gradient(std::ostream& log) {
  ModelParams params = ModelParams::init(12, 6, 0.08, 3);
  Mat dist(12, 1);
  double z = 0.0;
  for (int i = 0; i < 12; ++i) z += (dist.a[i] = 1.0 + (i % 4));
  for (double& p : dist.a) p /= z;

  auto table_grad = [&](bool stop) {
    Tape tape;
    auto m = model::TapeModel::bind(tape, params, true);
    NodeId d = tape.leaf(dist, false);
    NodeId mixed = model::logit_concat(m, {d}, stop)[0];
    // The anchor's gradient (ones on row 0) is the only legitimate path.
    NodeId anchor = tape.sum(tape.take_row(m.w_e, 0));
    tape.backward(tape.add(tape.sum(mixed), anchor));
    return tape.grad(m.w_e);
  };

  const Mat with_stop = table_grad(true);
  for (int i = 0; i < with_stop.rows; ++i) {
    for (int j = 0; j < with_stop.cols; ++j) {
      const double want = i == 0 ? 1.0 : 0.0;
      if (with_stop(i, j) != want) {
        log << "leak at (" << i << "," << j << "): " << with_stop(i, j);
        return false;
      }
    }
  }
  const Mat without = table_grad(false);
  bool nonzero_off_anchor = false;
  for (int i = 1; i < without.rows && !nonzero_off_anchor; ++i) {
    for (int j = 0; j < without.cols; ++j) {
      if (without(i, j) != 0.0) {
        nonzero_off_anchor = true;
        break;
      }
    }
  }
  log << "stopped gradient is exactly the anchor pattern; unstopped leaks as expected";
  return nonzero_off_anchor;
}

// ---------------------------------------------------------------------
// 5. Template round trip and consistency of augmented dialogs.
bool check_augmentation_round_trip(std::ostream& log) {
  eco::SyntheticCorpus corpus = reference_corpus();
  std::vector<eco::Template> templates;
  for (const eco::Dialog& d : corpus.train) {
    auto tpl = eco::delex(d, corpus.kb);
    if (!tpl) {
      log << "dialog " << d.id << " produced no template";
      return false;
    }
    auto back = eco::relex(*tpl, corpus.kb.entity(*d.meta_source_entity), corpus.kb);
    if (!back || !eco::same_surface(*back, d)) {
      log << "round trip failed for dialog " << d.id;
      return false;
    }
    templates.push_back(std::move(*tpl));
  }

  std::vector<eco::Dialog> augmented = eco::augment_batch(templates, corpus.kb, 3, 99);
  int turns = 0;
  for (const eco::Dialog& d : augmented) {
    for (const eco::DialogTurn& t : d.turns) {
      auto c = eco::turn_consistent(t.user, t.response, corpus.kb);
      turns++;
      if (c.has_value() && !*c) {
        log << "inconsistent augmented turn in dialog " << d.id;
        return false;
      }
    }
  }
  log << corpus.train.size() << " round trips exact; " << augmented.size()
      << " augmented dialogs / " << turns << " turns all consistent";
  return !augmented.empty();
}

// ---------------------------------------------------------------------
// 6. The combined score formula reproduces its published components.
bool check_score_formula(std::ostream& log) {
  double a = eco::score(12.61, 83.63, 75.37);
  double b = eco::score(15.05, 72.57, 64.16);
  log << "score(12.61, 83.63, 75.37) = " << a << ", score(15.05, 72.57, 64.16) = " << b;
  return std::abs(a - 92.11) <= 0.01 && std::abs(b - 83.42) <= 0.01;
}

// ---------------------------------------------------------------------
// 7. The canonical inconsistency example scores zero.
bool check_consistency_example(std::ostream& log) {
  eco::AttributeSchema schema{{"name", "area", "food", "price"}};
  std::vector<eco::Entity> es;
  eco::Entity e0;
  e0.id = 0;
  e0.values = {{"name", "gourmet kitchen"},
               {"area", "north"},
               {"food", "north american"},
               {"price", "expensive"}};
  eco::Entity e1;
  e1.id = 1;
  e1.values = {
      {"name", "roma corner"}, {"area", "south"}, {"food", "italian"}, {"price", "cheap"}};
  es.push_back(e0);
  es.push_back(e1);
  KnowledgeBase kb(schema, std::move(es));

  auto c = eco::turn_consistent(
      {}, eco::split_words("gourmet kitchen is an italian restaurant"), kb);
  if (!c.has_value()) {
    log << "example turn unexpectedly vacuous";
    return false;
  }
  log << "name + wrong cuisine turn scores " << (*c ? 1 : 0);
  return !*c;
}

// ---------------------------------------------------------------------
// 8 and 9 share the trained models.
struct TrainedRuns {
  std::vector<eco::RunOutcome> full;     // one per seed
  std::vector<eco::RunOutcome> no_trie;  // one per seed
  std::vector<uint64_t> seeds;
  eco::LoadedData data;
  ModelConfig base;
  eco::DecodeConfig dcfg;
  double elapsed = 0.0;
};

TrainedRuns train_reference_models() {
  eco::SyntheticCorpus c = reference_corpus();
  TrainedRuns runs{.full = {},
                   .no_trie = {},
                   .seeds = {},
                   .data = eco::prepare_experiment_data(c.kb, c.train, c.dev, c.test),
                   .base = {},
                   .dcfg = {},
                   .elapsed = 0.0};
  auto t0 = std::chrono::steady_clock::now();
  runs.base.d_model = 24;
  runs.base.epochs = 30;
  runs.base.eval_every = 5;
  runs.base.batch_size = 4;
  runs.base.p = 1;
  runs.base.max_len = 128;
  runs.seeds = {7, 8, 9};
  for (uint64_t seed : runs.seeds) {
    ModelConfig full = runs.base;
    full.seed = seed;
    runs.full.push_back(eco::run_experiment(runs.data, full, runs.dcfg));
    ModelConfig nt = full;
    nt.use_trie = false;
    runs.no_trie.push_back(eco::run_experiment(runs.data, nt, runs.dcfg));
  }
  runs.elapsed = seconds_since(t0);
  return runs;
}

bool check_end_to_end_training(const TrainedRuns& runs, std::ostream& log) {
  bool ok = true;
  double no_trie_validity = 0.0;
  for (size_t i = 0; i < runs.seeds.size(); ++i) {
    const eco::TrainResult& tr = runs.full[i].training;
    const double ratio = tr.final_avg_loss / tr.initial_avg_loss;
    const double fv = runs.full[i].report.entity_validity;
    const double nv = runs.no_trie[i].report.entity_validity;
    no_trie_validity += nv;
    log << "seed " << runs.seeds[i] << ": loss " << tr.initial_avg_loss << " -> "
        << tr.final_avg_loss << " (x" << ratio << "), validity " << fv << " vs " << nv
        << "; ";
    ok = ok && ratio <= 0.20 && fv == 100.0;
  }
  no_trie_validity /= static_cast<double>(runs.seeds.size());
  log << "unconstrained mean validity " << no_trie_validity << ", total " << runs.elapsed
      << "s";
  return ok && no_trie_validity < 100.0 && runs.elapsed < 600.0;
}

bool check_logit_eval_gap(const TrainedRuns& runs, std::ostream& log) {
  double tokens_mean = 0.0, logits_mean = 0.0;
  for (size_t i = 0; i < runs.seeds.size(); ++i) {
    ModelConfig full = runs.base;
    full.seed = runs.seeds[i];
    tokens_mean += runs.full[i].report.overall.consistency;

    ModelConfig le = full;
    le.logit_eval = true;
    auto preds = eco::generate_corpus(runs.full[i].training.best_params, runs.data.vocab,
                                      runs.data.trie, runs.data.kb, runs.data.test, le,
                                      runs.dcfg);
    eco::MetricsReport rep = eco::evaluate_corpus(runs.data.test, preds, runs.data.kb);
    logits_mean += rep.overall.consistency;
  }
  tokens_mean /= static_cast<double>(runs.seeds.size());
  logits_mean /= static_cast<double>(runs.seeds.size());
  log << "mean consistency: token conditioning " << tokens_mean << ", mix conditioning "
      << logits_mean;
  return tokens_mean >= logits_mean;
}

// ---------------------------------------------------------------------
// 10. Metric implementations against independently computed fixtures.
bool check_metric_oracles(std::ostream& log) {
  KnowledgeBase kb = [] {
    eco::AttributeSchema schema{{"name", "area", "food", "price"}};
    std::vector<eco::Entity> es;
    auto ent = [&](int id, std::string n, std::string a, std::string f, std::string p) {
      eco::Entity e;
      e.id = id;
      e.values = {{"name", n}, {"area", a}, {"food", f}, {"price", p}};
      es.push_back(e);
    };
    ent(0, "golden palace", "north", "italian", "cheap");
    ent(1, "silver garden", "south", "north american", "moderate");
    ent(2, "gourmet kitchen", "north", "north american", "expensive");
    ent(3, "palace", "east", "thai", "cheap");
    return KnowledgeBase(schema, std::move(es));
  }();

  const double got_bleu = eco::bleu(
      words({"you could try golden palace it has cheap price",
             "the rating of silver garden is superb", "glad to help goodbye",
             "it has italian food and cheap price",
             "try the crimson corner in the north area"}),
      words({"you could try golden palace it has cheap price",
             "the rating of silver garden is stellar", "you are welcome goodbye",
             "golden palace has italian food and moderate price",
             "you could try crimson corner it is in the north area"}));

  const eco::F1Result f1 = eco::info_f1(
      words({"you could try golden palace it has cheap price",
             "silver garden is in the south area", "gourmet kitchen serves italian food",
             "try palace in the east", "hello there"}),
      words({"you could try golden palace it has cheap price",
             "silver garden is in the south area with moderate price",
             "gourmet kitchen serves north american food", "try palace it is thai and cheap",
             "the price is moderate"}),
      kb);

  int informs = 0, succs = 0;
  auto tally = [&](std::map<std::string, std::string> cons, std::vector<std::string> reqs,
                   std::initializer_list<const char*> responses) {
    eco::UserGoal g;
    g.constraints = std::move(cons);
    g.requests = std::move(reqs);
    eco::InformSuccess is = eco::inform_success(words(responses), g, kb);
    informs += is.inform;
    succs += is.success;
  };
  tally({{"food", "italian"}}, {"price"},
        {"you could try golden palace", "golden palace has cheap price"});
  tally({{"area", "north"}}, {"food"},
        {"gourmet kitchen is a nice spot", "it serves italian food"});
  tally({{"price", "cheap"}}, {}, {"try silver garden"});
  tally({{"food", "thai"}}, {"area"}, {"palace is in the east area"});
  tally({{"area", "centre"}}, {"price"}, {"golden palace has cheap price"});
  const double inform_pct = 100.0 * informs / 5.0;
  const double success_pct = 100.0 * succs / 5.0;

  // Frozen outputs of a separate implementation of the same definitions.
  const double want_bleu = 58.935963570113785;
  const double want_f1 = 12.0 / 19.0;
  log << "bleu " << got_bleu << " (want " << want_bleu << "), f1 " << f1.f1 << " (want "
      << want_f1 << "), inform " << inform_pct << ", success " << success_pct;
  return std::abs(got_bleu - want_bleu) < 1e-6 && std::abs(f1.f1 - want_f1) < 1e-6 &&
         std::abs(inform_pct - 60.0) < 1e-6 && std::abs(success_pct - 40.0) < 1e-6;
}

}  // namespace

int main() {
  struct Check {
    int id;
    const char* name;
    std::function<bool(std::ostream&)> run;
  };

  // Checks 8 and 9 share six trained models; train them once up front.
  std::cout << "training reference models (3 seeds x {constrained, unconstrained})..."
            << std::endl;
  TrainedRuns runs = train_reference_models();

  const std::vector<Check> checks = {
      {1, "constrained decoding validity", check_trie_validity},
      {2, "masked renormalization properties", check_renormalization},
      {3, "gradients vs finite differences", check_gradients},
      {4, "gradient stop on the mix product", check_stop_gradient},
      {5, "augmentation round trip and consistency", check_augmentation_round_trip},
      {6, "combined score formula", check_score_formula},
      {7, "inconsistent turn scores zero", check_consistency_example},
      {8, "end-to-end training on the reference corpus",
       [&](std::ostream& log) { return check_end_to_end_training(runs, log); }},
      {9, "token conditioning beats mix conditioning at inference",
       [&](std::ostream& log) { return check_logit_eval_gap(runs, log); }},
      {10, "metric oracle fixtures", check_metric_oracles},
  };

  int failures = 0;
  for (const Check& c : checks) {
    std::ostringstream detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    failures += !ok;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name;
    const std::string d = detail.str();
    if (!d.empty()) std::cout << " | " << d;
    std::cout << std::endl;
  }
  if (failures > 0) {
    std::cout << failures << " acceptance check(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all acceptance checks passed" << std::endl;
  return 0;
}
