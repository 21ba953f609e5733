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

// Command line front end. Every subcommand is a pure function of its
// inputs, flags, and seed; ECO_SEED overrides the seed everywhere.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eco/jsonio.hpp"
#include "eco/pipeline.hpp"

namespace {

uint64_t env_seed_or(uint64_t fallback) {
  const char* env = std::getenv("ECO_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw eco::Error(std::string("ECO_SEED is not an unsigned integer: '") + env + "'");
  }
}

int cmd_synth(const eco::SyntheticSpec& spec_in, const std::string& out_dir, bool as_json) {
  eco::SyntheticSpec spec = spec_in;
  spec.seed = env_seed_or(spec.seed);
  eco::SyntheticCorpus corpus = eco::synth_corpus(spec);
  eco::write_corpus(corpus, out_dir);
  nlohmann::json summary{{"out_dir", out_dir},
                         {"entities", corpus.kb.size()},
                         {"train", corpus.train.size()},
                         {"dev", corpus.dev.size()},
                         {"test", corpus.test.size()}};
  if (as_json) {
    std::cout << summary.dump(2) << "\n";
  } else {
    std::cout << "wrote kb.json (" << corpus.kb.size() << " entities), train.jsonl ("
              << corpus.train.size() << "), dev.jsonl (" << corpus.dev.size()
              << "), test.jsonl (" << corpus.test.size() << "), goals.json under " << out_dir
              << "\n";
  }
  return 0;
}

int cmd_augment(const std::string& kb_path, const std::string& dialogs_path,
                const std::string& out_path, const std::string& report_path, int p,
                uint64_t seed, bool as_json) {
  eco::KnowledgeBase kb = eco::KnowledgeBase::load_file(kb_path);
  std::vector<eco::Dialog> dialogs = eco::load_dialogs(dialogs_path);
  for (const eco::Dialog& d : dialogs) eco::validate_dialog(d, kb.schema());
  eco::AugmentStats stats;
  eco::TrainingSets sets = eco::build_training_sets(dialogs, kb, p, env_seed_or(seed), &stats);
  eco::save_dialogs(out_path, sets.joined());
  if (!report_path.empty()) eco::write_json_file(report_path, stats.to_json());
  if (as_json) {
    std::cout << stats.to_json().dump(2) << "\n";
  } else {
    std::cout << "templates: " << stats.templates_out << "/" << stats.dialogs_in
              << ", augmented dialogs: " << stats.dialogs_out << ", wrote "
              << sets.d_tr.size() + sets.d_au.size() << " dialogs to " << out_path << "\n";
  }
  return 0;
}

int cmd_trie_dump(const std::string& kb_path, const std::string& out_path, bool as_json) {
  eco::KnowledgeBase kb = eco::KnowledgeBase::load_file(kb_path);
  eco::Vocabulary vocab = eco::Vocabulary::build(kb, {});
  eco::EntityTrie trie = eco::EntityTrie::build(kb, vocab);
  nlohmann::json dumped = trie.dump(vocab);
  if (!out_path.empty()) {
    eco::write_json_file(out_path, dumped);
    nlohmann::json summary{{"out", out_path},
                           {"entities", trie.num_entities()},
                           {"nodes", trie.node_count()},
                           {"max_path_len", trie.max_path_len()}};
    if (as_json) {
      std::cout << summary.dump(2) << "\n";
    } else {
      std::cout << "trie: " << trie.num_entities() << " entities, " << trie.node_count()
                << " nodes, max path " << trie.max_path_len() << "; wrote " << out_path << "\n";
    }
  } else {
    std::cout << dumped.dump(2) << "\n";
  }
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& variant) {
  eco::ExperimentConfig cfg = eco::ExperimentConfig::load_file(config_path);
  if (!variant.empty()) cfg.apply_variant(variant);
  eco::LoadedData data = eco::load_experiment_data(cfg.paths);
  std::filesystem::create_directories(cfg.paths.out_dir + "/ckpt");
  eco::RunOutcome outcome =
      eco::run_experiment(data, cfg.model, cfg.decode, cfg.paths.out_dir + "/ckpt", &std::cout);
  eco::save_checkpoint(cfg.paths.out_dir + "/ckpt/best.json", outcome.training.best_params,
                       cfg.model, data.vocab, data.kb.fingerprint());
  eco::write_json_file(cfg.paths.out_dir + "/training_log.json", outcome.training.log_json());
  std::cout << "best epoch " << outcome.training.best_epoch << ", dev score "
            << outcome.training.best_dev_score << "; checkpoint "
            << cfg.paths.out_dir + "/ckpt/best.json" << "\n";
  return 0;
}

int cmd_generate(const std::string& ckpt_path, const std::string& kb_path,
                 const std::string& dialogs_path, const std::string& out_path,
                 const eco::DecodeConfig& dcfg_in) {
  eco::Checkpoint ckpt = eco::load_checkpoint(ckpt_path);
  eco::KnowledgeBase kb = eco::KnowledgeBase::load_file(kb_path);
  ECO_CHECK(ckpt.kb_fingerprint == kb.fingerprint(),
            "checkpoint was trained against a different knowledge base");
  eco::Vocabulary vocab = eco::Vocabulary::from_words(ckpt.vocab_words);
  eco::EntityTrie trie = eco::EntityTrie::build(kb, vocab);
  std::vector<eco::Dialog> dialogs = eco::load_dialogs(dialogs_path);
  for (const eco::Dialog& d : dialogs) eco::validate_dialog(d, kb.schema());
  eco::DecodeConfig dcfg = dcfg_in;
  dcfg.seed = env_seed_or(dcfg.seed);
  std::vector<eco::DialogPrediction> preds =
      eco::generate_corpus(ckpt.params, vocab, trie, kb, dialogs, ckpt.config, dcfg);
  eco::save_predictions(out_path, preds);
  std::cout << "wrote predictions for " << preds.size() << " dialogs to " << out_path << "\n";
  return 0;
}

int cmd_eval(const std::string& preds_path, const std::string& refs_path,
             const std::string& kb_path, const std::string& goals_path,
             const std::string& report_path, bool as_json) {
  eco::KnowledgeBase kb = eco::KnowledgeBase::load_file(kb_path);
  std::vector<eco::Dialog> refs = eco::load_dialogs(refs_path);
  if (!goals_path.empty()) {
    std::vector<eco::UserGoal> goals = eco::load_goals(goals_path);
    ECO_CHECK(goals.size() == refs.size(),
              "goals file has " << goals.size() << " goals for " << refs.size() << " dialogs");
    for (size_t i = 0; i < refs.size(); ++i) refs[i].goal = goals[i];
  }
  std::vector<eco::DialogPrediction> preds = eco::load_predictions(preds_path);
  eco::MetricsReport report = eco::evaluate_corpus(refs, preds, kb);
  if (!report_path.empty()) eco::write_json_file(report_path, report.to_json());
  if (as_json) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    std::cout << eco::format_report_table(report);
  }
  return 0;
}

int cmd_pipeline(const std::string& config_path, const std::string& variant, bool as_json) {
  eco::ExperimentConfig cfg = eco::ExperimentConfig::load_file(config_path);
  if (!variant.empty()) cfg.apply_variant(variant);
  nlohmann::json summary = eco::run_pipeline(cfg, &std::cout);
  if (as_json) {
    std::cout << summary.dump(2) << "\n";
  } else {
    const nlohmann::json& overall = summary["report"]["overall"];
    std::cout << "test: bleu " << overall["bleu"] << ", inform " << overall["inform"]
              << ", success " << overall["success"] << ", score " << overall["score"]
              << ", f1 " << overall["f1"] << ", consistency " << overall["consistency"]
              << ", entity validity " << summary["report"]["entity_validity"] << "\n";
  }
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::vector<std::string>& variants,
               int n_seeds, const std::string& out_path, bool as_json) {
  eco::ExperimentConfig cfg = eco::ExperimentConfig::load_file(config_path);
  eco::LoadedData data = eco::load_experiment_data(cfg.paths);
  std::vector<eco::AblationRow> rows =
      eco::run_ablation(data, cfg, variants, n_seeds, &std::cout);
  nlohmann::json table = nlohmann::json::array();
  for (const eco::AblationRow& r : rows) table.push_back(r.to_json());
  nlohmann::json out{{"version", 1}, {"seeds", n_seeds}, {"rows", table}};
  if (!out_path.empty()) eco::write_json_file(out_path, out);
  if (as_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << eco::format_ablation_table(rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entity-consistent task-oriented dialog pipeline"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "print machine-readable JSON instead of tables");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  eco::SyntheticSpec spec;
  std::string synth_out = "data";
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--entities", spec.entities, "knowledge base size");
  synth->add_option("--attributes", spec.attributes, "schema size including name");
  synth->add_option("--value-pool", spec.value_pool, "distinct values per attribute");
  synth->add_option("--train", spec.train_dialogs, "training dialogs");
  synth->add_option("--dev", spec.dev_dialogs, "development dialogs");
  synth->add_option("--test", spec.test_dialogs, "test dialogs");
  synth->add_option("--seed", spec.seed, "corpus seed");
  synth->add_option("--domain", spec.domain, "domain label");
  synth->add_option("--none-rate", spec.none_rate, "chance an entity lacks one attribute");

  auto* augment = app.add_subcommand("augment", "extract templates and refill them");
  std::string aug_kb, aug_dialogs, aug_out = "dfn.jsonl", aug_report;
  int aug_p = 3;
  uint64_t aug_seed = 7;
  augment->add_option("--kb", aug_kb, "knowledge base json")->required();
  augment->add_option("--dialogs", aug_dialogs, "input dialogs jsonl")->required();
  augment->add_option("--out", aug_out, "output dialogs jsonl (originals plus augmented)");
  augment->add_option("--report", aug_report, "where to write the augmentation report");
  augment->add_option("--p", aug_p, "entities sampled per template");
  augment->add_option("--seed", aug_seed, "sampling seed");

  auto* trie = app.add_subcommand("trie", "entity trie utilities");
  trie->require_subcommand(1);
  auto* trie_dump = trie->add_subcommand("dump", "write the trie as json adjacency");
  std::string trie_kb, trie_out;
  trie_dump->add_option("--kb", trie_kb, "knowledge base json")->required();
  trie_dump->add_option("--out", trie_out, "output path (stdout when omitted)");

  auto* train = app.add_subcommand("train", "train a model from a config file");
  std::string train_config, train_variant;
  train->add_option("--config", train_config, "experiment config json")->required();
  train->add_option("--variant", train_variant,
                    "config variant: full, no_trie, no_logit_concat, logit_eval, "
                    "au_only, tr_only");

  auto* generate = app.add_subcommand("generate", "decode entities and responses");
  std::string gen_ckpt, gen_kb, gen_dialogs, gen_out = "preds.jsonl", gen_mode = "greedy";
  eco::DecodeConfig dcfg;
  generate->add_option("--ckpt", gen_ckpt, "checkpoint json")->required();
  generate->add_option("--kb", gen_kb, "knowledge base json")->required();
  generate->add_option("--dialogs", gen_dialogs, "dialogs jsonl to condition on")->required();
  generate->add_option("--out", gen_out, "predictions jsonl");
  generate->add_option("--mode", gen_mode, "greedy or top_k");
  generate->add_option("--top-k", dcfg.top_k, "candidate pool for top_k");
  generate->add_option("--temperature", dcfg.temperature, "softmax temperature");
  generate->add_option("--seed", dcfg.seed, "sampling seed");

  auto* eval = app.add_subcommand("eval", "score predictions against references");
  std::string eval_preds, eval_refs, eval_kb, eval_goals, eval_report;
  eval->add_option("--preds", eval_preds, "predictions jsonl")->required();
  eval->add_option("--refs", eval_refs, "reference dialogs jsonl")->required();
  eval->add_option("--kb", eval_kb, "knowledge base json")->required();
  eval->add_option("--goals", eval_goals, "goal list overriding the references' goals");
  eval->add_option("--report", eval_report, "where to write the report json");

  auto* pipeline = app.add_subcommand("pipeline", "augment, train, generate, evaluate");
  std::string pipe_config, pipe_variant;
  pipeline->add_option("--config", pipe_config, "experiment config json")->required();
  pipeline->add_option("--variant", pipe_variant,
                       "config variant: full, no_trie, no_logit_concat, logit_eval, "
                       "au_only, tr_only");

  auto* ablate = app.add_subcommand("ablate", "run the config variant matrix");
  std::string abl_config, abl_out;
  std::vector<std::string> abl_variants = {"full",       "no_trie", "no_logit_concat",
                                           "logit_eval", "au_only", "tr_only"};
  int abl_seeds = 3;
  ablate->add_option("--config", abl_config, "experiment config json")->required();
  ablate->add_option("--variants", abl_variants, "variant names")->delimiter(',');
  ablate->add_option("--seeds", abl_seeds, "seeds per variant");
  ablate->add_option("--out", abl_out, "where to write the comparison json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(spec, synth_out, as_json);
    if (*augment)
      return cmd_augment(aug_kb, aug_dialogs, aug_out, aug_report, aug_p, aug_seed, as_json);
    if (*trie_dump) return cmd_trie_dump(trie_kb, trie_out, as_json);
    if (*train) return cmd_train(train_config, train_variant);
    if (*generate) {
      if (gen_mode == "greedy") {
        dcfg.mode = eco::DecodeConfig::Mode::kGreedy;
      } else if (gen_mode == "top_k" || gen_mode == "topk") {
        dcfg.mode = eco::DecodeConfig::Mode::kTopK;
      } else {
        throw eco::Error("unknown decode mode '" + gen_mode + "'");
      }
      return cmd_generate(gen_ckpt, gen_kb, gen_dialogs, gen_out, dcfg);
    }
    if (*eval)
      return cmd_eval(eval_preds, eval_refs, eval_kb, eval_goals, eval_report, as_json);
    if (*pipeline) return cmd_pipeline(pipe_config, pipe_variant, as_json);
    if (*ablate) return cmd_ablate(abl_config, abl_variants, abl_seeds, abl_out, as_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
