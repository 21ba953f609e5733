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

#include "eco/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <utility>

#include "eco/jsonio.hpp"

namespace eco {

namespace {

constexpr uint64_t kAugmentStream = 1000;  // must match the trainer's stream

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return r;
}

nlohmann::json metric_json(const std::vector<double>& xs) {
  MeanStd ms = mean_std(xs);
  return nlohmann::json{{"mean", std::round(ms.mean * 100.0) / 100.0},
                        {"std", std::round(ms.std * 100.0) / 100.0},
                        {"values", xs}};
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{{"version", 1},
                        {"paths", nlohmann::json{{"kb", paths.kb},
                                                 {"train", paths.train},
                                                 {"dev", paths.dev},
                                                 {"test", paths.test},
                                                 {"out_dir", paths.out_dir}}},
                        {"model", model.to_json()},
                        {"decode", decode.to_json()}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("paths")) {
    const nlohmann::json& p = j["paths"];
    c.paths.kb = p.value("kb", c.paths.kb);
    c.paths.train = p.value("train", c.paths.train);
    c.paths.dev = p.value("dev", c.paths.dev);
    c.paths.test = p.value("test", c.paths.test);
    c.paths.out_dir = p.value("out_dir", c.paths.out_dir);
  }
  if (j.contains("model")) c.model = ModelConfig::from_json(j["model"]);
  if (j.contains("decode")) c.decode = DecodeConfig::from_json(j["decode"]);
  return c;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  ExperimentConfig c = from_json(read_json_file(path));
  const std::pair<const char*, const std::string*> required[] = {
      {"paths.kb", &c.paths.kb},
      {"paths.train", &c.paths.train},
      {"paths.dev", &c.paths.dev},
      {"paths.test", &c.paths.test}};
  for (const auto& [key, value] : required) {
    ECO_CHECK(!value->empty(),
              "config " << path << " is missing required key " << key);
  }
  c.apply_env_seed();
  return c;
}

void ExperimentConfig::apply_env_seed() {
  const char* env = std::getenv("ECO_SEED");
  if (env == nullptr || *env == '\0') return;
  try {
    model.seed = std::stoull(env);
  } catch (const std::exception&) {
    throw Error(std::string("ECO_SEED is not an unsigned integer: '") + env + "'");
  }
}

void ExperimentConfig::apply_variant(const std::string& variant) {
  if (variant == "full") return;
  if (variant == "no_trie") {
    model.use_trie = false;
  } else if (variant == "no_logit_concat") {
    model.use_logit_concat = false;
  } else if (variant == "logit_eval") {
    model.logit_eval = true;
  } else if (variant == "au_only") {
    model.data_mode = ModelConfig::DataMode::kAuOnly;
  } else if (variant == "tr_only") {
    model.data_mode = ModelConfig::DataMode::kTrOnly;
  } else {
    throw Error("unknown ablation variant '" + variant + "'");
  }
}

Vocabulary vocab_from_dialogs(const KnowledgeBase& kb, const std::vector<Dialog>& dialogs) {
  std::vector<std::string> texts;
  for (const Dialog& d : dialogs) {
    for (const DialogTurn& t : d.turns) {
      texts.push_back(join_words(t.user));
      texts.push_back(join_words(t.response));
    }
  }
  return Vocabulary::build(kb, texts);
}

LoadedData prepare_experiment_data(const KnowledgeBase& kb, std::vector<Dialog> train,
                                   std::vector<Dialog> dev, std::vector<Dialog> test) {
  for (const auto* split : {&train, &dev, &test}) {
    for (const Dialog& d : *split) validate_dialog(d, kb.schema());
  }
  Vocabulary vocab = vocab_from_dialogs(kb, train);
  EntityTrie trie = EntityTrie::build(kb, vocab);
  AugmentStats stats;
  std::vector<Template> templates = delex_corpus(train, kb, &stats);
  return LoadedData{kb,         std::move(train),     std::move(dev), std::move(test),
                    std::move(vocab), std::move(trie), std::move(templates), stats};
}

LoadedData load_experiment_data(const ExperimentPaths& paths) {
  KnowledgeBase kb = KnowledgeBase::load_file(paths.kb);
  return prepare_experiment_data(kb, load_dialogs(paths.train), load_dialogs(paths.dev),
                                 load_dialogs(paths.test));
}

RunOutcome run_experiment(const LoadedData& data, const ModelConfig& mcfg,
                          const DecodeConfig& dcfg, const std::string& ckpt_dir,
                          std::ostream* log) {
  DevEvaluator dev_eval = [&](const ModelParams& params, int epoch) {
    (void)epoch;
    std::vector<DialogPrediction> preds =
        generate_corpus(params, data.vocab, data.trie, data.kb, data.dev, mcfg, dcfg);
    MetricsReport report = evaluate_corpus(data.dev, preds, data.kb);
    return report.overall.score;
  };

  RunOutcome out;
  out.training = train(data.train, data.templates, data.kb, data.trie, data.vocab, mcfg,
                       ckpt_dir, data.dev.empty() ? DevEvaluator{} : dev_eval, log);
  out.predictions = generate_corpus(out.training.best_params, data.vocab, data.trie, data.kb,
                                    data.test, mcfg, dcfg);
  out.report = evaluate_corpus(data.test, out.predictions, data.kb);
  return out;
}

nlohmann::json run_pipeline(const ExperimentConfig& cfg, std::ostream* log) {
  auto note = [&](const std::string& line) {
    if (log) *log << "[pipeline] " << line << "\n";
  };
  auto staged = [](const char* stage, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw Error(std::string("stage '") + stage + "' failed: " + e.what());
    }
  };

  const std::string out_dir = cfg.paths.out_dir;
  std::filesystem::create_directories(out_dir);

  note("loading corpus and building vocabulary, trie, templates");
  LoadedData data = staged("load", [&] { return load_experiment_data(cfg.paths); });
  note("kb entities: " + std::to_string(data.kb.size()) +
       ", vocab: " + std::to_string(data.vocab.size()) +
       ", templates: " + std::to_string(data.templates.size()));

  staged("augment", [&] {
    AugmentStats stats = data.delex_stats;
    std::vector<Dialog> d_au = augment_batch(data.templates, data.kb, cfg.model.p,
                                             mix_seed(cfg.model.seed, kAugmentStream + 1),
                                             &stats);
    std::vector<Dialog> d_fn = data.train;
    d_fn.insert(d_fn.end(), d_au.begin(), d_au.end());
    save_dialogs(out_dir + "/dfn.jsonl", d_fn);
    write_json_file(out_dir + "/augment_report.json", stats.to_json());
    note("augmented dialogs (first round): " + std::to_string(d_au.size()));
    return 0;
  });

  staged("trie", [&] {
    write_json_file(out_dir + "/trie_summary.json",
                    nlohmann::json{{"version", 1},
                                   {"entities", data.trie.num_entities()},
                                   {"nodes", data.trie.node_count()},
                                   {"max_path_len", data.trie.max_path_len()},
                                   {"kb_fingerprint", data.trie.source_kb_hash()}});
    return 0;
  });

  note("training");
  RunOutcome outcome = staged("train", [&] {
    return run_experiment(data, cfg.model, cfg.decode, out_dir + "/ckpt", log);
  });

  staged("artifacts", [&] {
    save_checkpoint(out_dir + "/ckpt/best.json", outcome.training.best_params, cfg.model,
                    data.vocab, data.kb.fingerprint());
    write_json_file(out_dir + "/training_log.json", outcome.training.log_json());
    save_predictions(out_dir + "/preds.jsonl", outcome.predictions);
    write_json_file(out_dir + "/report.json", outcome.report.to_json());
    return 0;
  });

  nlohmann::json summary{{"version", 1},
                         {"config", cfg.to_json()},
                         {"best_epoch", outcome.training.best_epoch},
                         {"initial_avg_loss", outcome.training.initial_avg_loss},
                         {"final_avg_loss", outcome.training.final_avg_loss},
                         {"report", outcome.report.to_json()}};
  write_json_file(out_dir + "/summary.json", summary);
  note("done; artifacts in " + out_dir);
  return summary;
}

nlohmann::json AblationRow::to_json() const {
  return nlohmann::json{{"variant", variant},
                        {"bleu", metric_json(bleu)},
                        {"inform", metric_json(inform)},
                        {"success", metric_json(success)},
                        {"score", metric_json(score)},
                        {"f1", metric_json(f1)},
                        {"consistency", metric_json(consistency)},
                        {"entity_validity", metric_json(validity)}};
}

std::vector<AblationRow> run_ablation(const LoadedData& data, const ExperimentConfig& base,
                                      const std::vector<std::string>& variants, int n_seeds,
                                      std::ostream* log) {
  ECO_CHECK(n_seeds >= 1, "ablation needs at least one seed");
  std::vector<AblationRow> rows;
  for (const std::string& variant : variants) {
    AblationRow row;
    row.variant = variant;
    for (int s = 0; s < n_seeds; ++s) {
      ExperimentConfig cfg = base;
      cfg.apply_variant(variant);
      cfg.model.seed = base.model.seed + static_cast<uint64_t>(s);
      if (log) {
        *log << "[ablate] variant " << variant << " seed " << cfg.model.seed << "\n";
      }
      RunOutcome outcome = run_experiment(data, cfg.model, cfg.decode);
      const MetricsBundle& b = outcome.report.overall;
      row.bleu.push_back(b.bleu);
      row.inform.push_back(b.inform);
      row.success.push_back(b.success);
      row.score.push_back(b.score);
      row.f1.push_back(b.f1);
      row.consistency.push_back(b.consistency);
      row.validity.push_back(outcome.report.entity_validity);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string fmt2(double x) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << x;
  return ss.str();
}

void table_row(std::ostringstream& out, const std::string& label,
               const std::vector<std::string>& cells, int label_w, int cell_w) {
  out << std::left << std::setw(label_w) << label << std::right;
  for (const std::string& c : cells) out << std::setw(cell_w) << c;
  out << "\n";
}

}  // namespace

std::string format_report_table(const MetricsReport& report) {
  std::ostringstream out;
  const std::vector<std::string> header = {"BLEU",  "Inform",      "Success", "Score",
                                           "F1",    "Consistency", "Validity"};
  auto cells = [&](const MetricsBundle& b, double validity) {
    return std::vector<std::string>{fmt2(b.bleu),  fmt2(b.inform),      fmt2(b.success),
                                    fmt2(b.score), fmt2(b.f1),          fmt2(b.consistency),
                                    validity < 0 ? std::string("-") : fmt2(validity)};
  };
  const int label_w = 20, cell_w = 13;
  table_row(out, "", header, label_w, cell_w);
  table_row(out, "overall", cells(report.overall, report.entity_validity), label_w, cell_w);
  if (report.single_match.dialogs > 0) {
    table_row(out, "single-match(" + std::to_string(report.single_match.dialogs) + ")",
              cells(report.single_match, -1), label_w, cell_w);
  }
  if (report.multi_match.dialogs > 0) {
    table_row(out, "multi-match(" + std::to_string(report.multi_match.dialogs) + ")",
              cells(report.multi_match, -1), label_w, cell_w);
  }
  for (const auto& [domain, bundle] : report.per_domain) {
    table_row(out, "domain:" + domain, cells(bundle, -1), label_w, cell_w);
  }
  return out.str();
}

std::string format_ablation_table(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  const std::vector<std::string> header = {"BLEU",  "Inform",      "Success", "Score",
                                           "F1",    "Consistency", "Validity"};
  const int label_w = 18, cell_w = 15;
  table_row(out, "variant", header, label_w, cell_w);
  for (const AblationRow& r : rows) {
    auto cell = [&](const std::vector<double>& xs) {
      MeanStd ms = mean_std(xs);
      return fmt2(ms.mean) + "+-" + fmt2(ms.std);
    };
    table_row(out, r.variant,
              {cell(r.bleu), cell(r.inform), cell(r.success), cell(r.score), cell(r.f1),
               cell(r.consistency), cell(r.validity)},
              label_w, cell_w);
  }
  return out.str();
}

}  // namespace eco
