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

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "eco/jsonio.hpp"
#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;
using eco::ExperimentConfig;
using eco::ModelConfig;

TEST_CASE("experiment config round trip and variants") {
  ExperimentConfig c;
  c.paths.kb = "kb.json";
  c.paths.train = "train.jsonl";
  c.paths.out_dir = "runs/x";
  c.model.epochs = 3;
  c.decode.top_k = 9;
  ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.paths.kb == "kb.json");
  CHECK(back.paths.out_dir == "runs/x");
  CHECK(back.model.epochs == 3);
  CHECK(back.decode.top_k == 9);

  ExperimentConfig v = c;
  v.apply_variant("no_trie");
  CHECK(!v.model.use_trie);
  v = c;
  v.apply_variant("no_logit_concat");
  CHECK(!v.model.use_logit_concat);
  v = c;
  v.apply_variant("logit_eval");
  CHECK(v.model.logit_eval);
  v = c;
  v.apply_variant("au_only");
  CHECK(v.model.data_mode == ModelConfig::DataMode::kAuOnly);
  v = c;
  v.apply_variant("tr_only");
  CHECK(v.model.data_mode == ModelConfig::DataMode::kTrOnly);
  v = c;
  v.apply_variant("full");
  CHECK(v.model.use_trie);
  CHECK_THROWS_AS(v.apply_variant("bogus"), eco::Error);
}

TEST_CASE("loading a config without dataset paths is an error") {
  fs::path dir = fs::temp_directory_path() / "eco_test_config";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path path = dir / "config.json";

  eco::write_json_file(path.string(),
                       nlohmann::json{{"version", 1}, {"model", {{"d_model", 8}}}});
  CHECK_THROWS_WITH_AS(ExperimentConfig::load_file(path.string()),
                       doctest::Contains("paths.kb"), eco::Error);

  ExperimentConfig full;
  full.paths.kb = "kb.json";
  full.paths.train = "train.jsonl";
  full.paths.dev = "dev.jsonl";
  full.paths.test = "test.jsonl";
  eco::write_json_file(path.string(), full.to_json());
  CHECK(ExperimentConfig::load_file(path.string()).paths.dev == "dev.jsonl");
  fs::remove_all(dir);
}

TEST_CASE("environment seed override") {
  ExperimentConfig c;
  c.model.seed = 7;
  setenv("ECO_SEED", "123", 1);
  c.apply_env_seed();
  CHECK(c.model.seed == 123);
  setenv("ECO_SEED", "not-a-number", 1);
  CHECK_THROWS_AS(c.apply_env_seed(), eco::Error);
  unsetenv("ECO_SEED");
  c.model.seed = 9;
  c.apply_env_seed();
  CHECK(c.model.seed == 9);
}

TEST_CASE("prepare_experiment_data assembles vocab, trie, templates") {
  eco::KnowledgeBase kb = eco::testutil::fixture_kb();
  std::vector<eco::Dialog> train = {eco::testutil::fixture_dialog()};
  eco::LoadedData data = eco::prepare_experiment_data(kb, train, {}, {});
  CHECK(data.vocab.contains("looking"));
  CHECK(data.trie.num_entities() == kb.size());
  CHECK(data.templates.size() == 1);
  CHECK(data.delex_stats.dialogs_in == 1);

  std::vector<eco::Dialog> broken = train;
  broken[0].turns[0].spans[0].end = 99;
  CHECK_THROWS_AS(eco::prepare_experiment_data(kb, broken, {}, {}), eco::Error);
}

// One micro end-to-end run shared by the pipeline and ablation tests.
struct MicroWorld {
  fs::path dir = fs::temp_directory_path() / "eco_test_pipeline";
  ExperimentConfig cfg;

  MicroWorld() {
    fs::remove_all(dir);
    eco::SyntheticSpec spec;
    spec.entities = 6;
    spec.attributes = 3;
    spec.value_pool = 2;
    spec.train_dialogs = 8;
    spec.dev_dialogs = 2;
    spec.test_dialogs = 2;
    spec.seed = 31;
    eco::write_corpus(eco::synth_corpus(spec), dir.string());

    cfg.paths.kb = (dir / "kb.json").string();
    cfg.paths.train = (dir / "train.jsonl").string();
    cfg.paths.dev = (dir / "dev.jsonl").string();
    cfg.paths.test = (dir / "test.jsonl").string();
    cfg.paths.out_dir = (dir / "out").string();
    cfg.model.d_model = 8;
    cfg.model.epochs = 2;
    cfg.model.eval_every = 1;
    cfg.model.batch_size = 4;
    cfg.model.p = 1;
    cfg.model.max_len = 96;
    cfg.model.seed = 3;
  }
  ~MicroWorld() { fs::remove_all(dir); }
};

TEST_CASE("run_pipeline writes every artifact") {
  MicroWorld w;
  nlohmann::json summary = eco::run_pipeline(w.cfg);
  const std::string out = w.cfg.paths.out_dir;

  CHECK(!eco::load_dialogs(out + "/dfn.jsonl").empty());
  nlohmann::json aug = eco::read_json_file(out + "/augment_report.json");
  CHECK(aug["templates_out"].get<int>() > 0);
  nlohmann::json trie = eco::read_json_file(out + "/trie_summary.json");
  CHECK(trie["entities"] == 6);
  nlohmann::json log = eco::read_json_file(out + "/training_log.json");
  CHECK(log["epochs"].size() == 2);
  CHECK(!eco::load_predictions(out + "/preds.jsonl").empty());
  nlohmann::json report = eco::read_json_file(out + "/report.json");
  CHECK(report.contains("overall"));
  CHECK(report.contains("entity_validity"));
  eco::Checkpoint best = eco::load_checkpoint(out + "/ckpt/best.json");
  CHECK(best.config.d_model == 8);

  CHECK(summary["report"]["overall"].contains("score"));
  CHECK(summary["best_epoch"].get<int>() >= 1);
  nlohmann::json on_disk = eco::read_json_file(out + "/summary.json");
  CHECK(on_disk["best_epoch"] == summary["best_epoch"]);

  // stage failures carry the stage name
  ExperimentConfig broken = w.cfg;
  broken.paths.kb = (w.dir / "missing.json").string();
  try {
    eco::run_pipeline(broken);
    FAIL("expected a load failure");
  } catch (const eco::Error& e) {
    CHECK(std::string(e.what()).find("stage 'load'") != std::string::npos);
  }
}

TEST_CASE("ablation rows cover the requested variants") {
  MicroWorld w;
  eco::LoadedData data = eco::load_experiment_data(w.cfg.paths);
  std::vector<eco::AblationRow> rows =
      eco::run_ablation(data, w.cfg, {"full", "no_trie"}, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].variant == "full");
  CHECK(rows[1].variant == "no_trie");
  for (const eco::AblationRow& r : rows) {
    CHECK(r.score.size() == 1);
    nlohmann::json j = r.to_json();
    CHECK(j["score"]["std"] == 0.0);  // single seed
    CHECK(j["entity_validity"]["values"].size() == 1);
  }
  CHECK(rows[0].validity[0] == 100.0);  // trie-constrained decode

  std::string table = eco::format_ablation_table(rows);
  CHECK(table.find("no_trie") != std::string::npos);
  CHECK(table.find("Consistency") != std::string::npos);

  eco::MetricsReport rep;
  rep.overall.bleu = 12.3456;
  rep.overall.dialogs = 1;
  std::string rt = eco::format_report_table(rep);
  CHECK(rt.find("overall") != std::string::npos);
  CHECK(rt.find("12.35") != std::string::npos);
}

TEST_CASE("pipeline reruns reproduce the report") {
  MicroWorld w;
  nlohmann::json a = eco::run_pipeline(w.cfg);
  nlohmann::json b = eco::run_pipeline(w.cfg);
  CHECK(a["report"].dump() == b["report"].dump());
}

}  // namespace
