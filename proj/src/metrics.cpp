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

#include "eco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "eco/jsonio.hpp"

namespace eco {

namespace {

bool matches_at(const Words& text, size_t pos, const Words& value) {
  if (pos + value.size() > text.size()) return false;
  for (size_t i = 0; i < value.size(); ++i) {
    if (text[pos + i] != value[i]) return false;
  }
  return true;
}

bool contains_contiguous(const Words& text, const Words& needle) {
  if (needle.empty() || needle.size() > text.size()) return false;
  for (size_t pos = 0; pos + needle.size() <= text.size(); ++pos) {
    if (matches_at(text, pos, needle)) return true;
  }
  return false;
}

bool entity_covers(const Entity& e, const std::set<InfoPair>& pairs) {
  for (const InfoPair& p : pairs) {
    auto it = e.values.find(p.attribute);
    if (it == e.values.end() || it->second != p.value) return false;
  }
  return true;
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

double pct(long long num, long long den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::set<InfoPair> extract_info(const Words& text, const KnowledgeBase& kb) {
  const std::vector<LexiconEntry>& lex = kb.value_lexicon();
  std::set<InfoPair> out;
  size_t pos = 0;
  while (pos < text.size()) {
    // Longest value match at this position; the lexicon is ordered by
    // schema attribute then value, so the first longest entry wins ties.
    const LexiconEntry* best = nullptr;
    for (const LexiconEntry& le : lex) {
      if (best && le.value.size() <= best->value.size()) continue;
      if (matches_at(text, pos, le.value)) best = &le;
    }
    if (best) {
      out.insert(InfoPair{best->attribute, join_words(best->value)});
      pos += best->value.size();
    } else {
      ++pos;
    }
  }
  return out;
}

std::optional<bool> turn_consistent(const Words& user, const Words& response,
                                    const KnowledgeBase& kb) {
  std::set<InfoPair> pairs = extract_info(user, kb);
  std::set<InfoPair> resp = extract_info(response, kb);
  pairs.insert(resp.begin(), resp.end());
  if (pairs.empty()) return std::nullopt;
  for (const Entity& e : kb.entities()) {
    if (entity_covers(e, pairs)) return true;
  }
  return false;
}

ConsistencyResult consistency(const std::vector<std::pair<Words, Words>>& turns,
                              const KnowledgeBase& kb, bool exclude_vacuous) {
  ConsistencyResult r;
  int counted = 0;
  int hits = 0;
  for (const auto& [user, response] : turns) {
    ++r.turns;
    std::optional<bool> c = turn_consistent(user, response, kb);
    if (!c) {
      ++r.vacuous;
      if (!exclude_vacuous) {
        ++counted;
        ++hits;
        ++r.consistent;
      }
      continue;
    }
    ++counted;
    if (*c) {
      ++hits;
      ++r.consistent;
    }
  }
  r.value = counted == 0 ? 1.0 : static_cast<double>(hits) / counted;
  return r;
}

F1Result info_f1(const std::vector<Words>& predictions, const std::vector<Words>& references,
                 const KnowledgeBase& kb) {
  ECO_CHECK(predictions.size() == references.size(),
            "info_f1: " << predictions.size() << " predictions vs " << references.size()
                        << " references");
  F1Result r;
  for (size_t i = 0; i < predictions.size(); ++i) {
    std::set<InfoPair> p = extract_info(predictions[i], kb);
    std::set<InfoPair> g = extract_info(references[i], kb);
    for (const InfoPair& x : p) {
      if (g.count(x)) ++r.tp;
    }
    r.predicted += static_cast<long long>(p.size());
    r.referenced += static_cast<long long>(g.size());
  }
  if (r.predicted == 0 && r.referenced == 0) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  r.precision = r.predicted == 0 ? 0.0 : static_cast<double>(r.tp) / r.predicted;
  r.recall = r.referenced == 0 ? 0.0 : static_cast<double>(r.tp) / r.referenced;
  r.f1 = (r.precision + r.recall) == 0.0
             ? 0.0
             : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

InformSuccess inform_success(const std::vector<Words>& responses, const UserGoal& goal,
                             const KnowledgeBase& kb) {
  InformSuccess out;
  std::vector<int> named;
  for (int id : kb.matching_entities(goal)) {
    const Words name = split_words(kb.entity(id).value("name"));
    for (const Words& r : responses) {
      if (contains_contiguous(r, name)) {
        named.push_back(id);
        break;
      }
    }
  }
  out.inform = !named.empty();
  if (!out.inform) return out;

  out.success = true;
  for (const std::string& req : goal.requests) {
    bool provided = false;
    for (int id : named) {
      auto it = kb.entity(id).values.find(req);
      if (it == kb.entity(id).values.end()) continue;
      const Words value = split_words(it->second);
      for (const Words& r : responses) {
        if (contains_contiguous(r, value)) {
          provided = true;
          break;
        }
      }
      if (provided) break;
    }
    if (!provided) {
      out.success = false;
      break;
    }
  }
  return out;
}

double bleu(const std::vector<Words>& predictions, const std::vector<Words>& references) {
  ECO_CHECK(predictions.size() == references.size(),
            "bleu: " << predictions.size() << " predictions vs " << references.size()
                     << " references");
  ECO_CHECK(!predictions.empty(), "bleu: empty corpus");

  auto ngram_counts = [](const Words& w, int n) {
    std::unordered_map<std::string, int> counts;
    if (static_cast<int>(w.size()) >= n) {
      for (size_t i = 0; i + n <= w.size(); ++i) {
        std::string key;
        for (int k = 0; k < n; ++k) {
          key += w[i + k];
          key.push_back('\x1f');
        }
        ++counts[key];
      }
    }
    return counts;
  };

  long long matched[5] = {0, 0, 0, 0, 0};
  long long total[5] = {0, 0, 0, 0, 0};
  long long pred_len = 0, ref_len = 0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    pred_len += static_cast<long long>(predictions[i].size());
    ref_len += static_cast<long long>(references[i].size());
    for (int n = 1; n <= 4; ++n) {
      auto pc = ngram_counts(predictions[i], n);
      auto rc = ngram_counts(references[i], n);
      for (const auto& [key, cnt] : pc) {
        auto it = rc.find(key);
        if (it != rc.end()) matched[n] += std::min(cnt, it->second);
        total[n] += cnt;
      }
    }
  }

  if (total[1] == 0 || matched[1] == 0) return 0.0;
  double log_sum = std::log(static_cast<double>(matched[1]) / total[1]);
  for (int n = 2; n <= 4; ++n) {
    // Add-one smoothing keeps short or sparse corpora off negative infinity.
    log_sum += std::log(static_cast<double>(matched[n] + 1) / static_cast<double>(total[n] + 1));
  }
  const double brevity =
      pred_len >= ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(pred_len));
  return 100.0 * brevity * std::exp(0.25 * log_sum);
}

double score(double bleu_value, double inform_pct, double success_pct) {
  return bleu_value + (inform_pct + success_pct) / 2.0;
}

nlohmann::json MetricsBundle::to_json() const {
  return nlohmann::json{{"bleu", round2(bleu)},     {"inform", round2(inform)},
                        {"success", round2(success)}, {"score", round2(score)},
                        {"f1", round2(f1)},         {"consistency", round2(consistency)},
                        {"dialogs", dialogs},       {"turns", turns}};
}

void save_predictions(const std::string& path, const std::vector<DialogPrediction>& preds) {
  std::vector<nlohmann::json> lines;
  lines.push_back(nlohmann::json{{"version", 1}, {"kind", "predictions"}});
  for (const DialogPrediction& d : preds) {
    for (size_t t = 0; t < d.turns.size(); ++t) {
      const TurnPrediction& tp = d.turns[t];
      nlohmann::json j{{"dialog_id", d.dialog_id},
                       {"turn", static_cast<int>(t)},
                       {"generated_response", join_words(tp.response)}};
      if (tp.has_entity) {
        j["generated_entity"] = join_words(tp.entity);
        j["entity_valid"] = tp.entity_valid;
      }
      lines.push_back(std::move(j));
    }
  }
  write_jsonl_file(path, lines);
}

std::vector<DialogPrediction> load_predictions(const std::string& path) {
  std::vector<DialogPrediction> out;
  for (const nlohmann::json& j : read_jsonl_file(path)) {
    if (j.contains("kind")) {
      ECO_CHECK(j["kind"] == "predictions", "unexpected kind in " << path);
      continue;
    }
    const std::string id = j.at("dialog_id").get<std::string>();
    if (out.empty() || out.back().dialog_id != id) {
      out.push_back(DialogPrediction{id, {}});
    }
    const int turn = j.at("turn").get<int>();
    ECO_CHECK(turn == static_cast<int>(out.back().turns.size()),
              "predictions for dialog '" << id << "' are not in turn order");
    TurnPrediction tp;
    tp.response = split_words(j.at("generated_response").get<std::string>());
    if (j.contains("generated_entity")) {
      tp.entity = split_words(j["generated_entity"].get<std::string>());
      tp.has_entity = true;
      tp.entity_valid = j.value("entity_valid", false);
    }
    out.back().turns.push_back(std::move(tp));
  }
  return out;
}

namespace {

MetricsBundle bundle_over(const std::vector<const Dialog*>& refs,
                          const std::vector<const DialogPrediction*>& preds,
                          const KnowledgeBase& kb) {
  MetricsBundle b;
  b.dialogs = static_cast<int>(refs.size());
  if (refs.empty()) return b;

  std::vector<Words> pred_resps, ref_resps;
  std::vector<std::pair<Words, Words>> consistency_turns;
  int informs = 0, successes = 0;
  for (size_t i = 0; i < refs.size(); ++i) {
    const Dialog& d = *refs[i];
    const DialogPrediction& p = *preds[i];
    std::vector<Words> dialog_responses;
    for (size_t t = 0; t < d.turns.size(); ++t) {
      pred_resps.push_back(p.turns[t].response);
      ref_resps.push_back(d.turns[t].response);
      consistency_turns.emplace_back(d.turns[t].user, p.turns[t].response);
      dialog_responses.push_back(p.turns[t].response);
    }
    InformSuccess is = inform_success(dialog_responses, d.goal, kb);
    informs += is.inform ? 1 : 0;
    successes += is.success ? 1 : 0;
  }
  b.turns = static_cast<int>(pred_resps.size());
  b.bleu = bleu(pred_resps, ref_resps);
  b.inform = pct(informs, b.dialogs);
  b.success = pct(successes, b.dialogs);
  b.score = score(b.bleu, b.inform, b.success);
  b.f1 = 100.0 * info_f1(pred_resps, ref_resps, kb).f1;
  b.consistency = 100.0 * consistency(consistency_turns, kb).value;
  return b;
}

}  // namespace

MetricsReport evaluate_corpus(const std::vector<Dialog>& refs,
                              const std::vector<DialogPrediction>& preds,
                              const KnowledgeBase& kb) {
  ECO_CHECK(refs.size() == preds.size(),
            "evaluate: " << refs.size() << " reference dialogs vs " << preds.size()
                         << " predicted");
  std::vector<const Dialog*> all_refs;
  std::vector<const DialogPrediction*> all_preds;
  for (size_t i = 0; i < refs.size(); ++i) {
    ECO_CHECK(preds[i].dialog_id == refs[i].id,
              "evaluate: dialog order mismatch at index " << i << " ('" << preds[i].dialog_id
                                                          << "' vs '" << refs[i].id << "')");
    ECO_CHECK(preds[i].turns.size() == refs[i].turns.size(),
              "evaluate: turn count mismatch in dialog '" << refs[i].id << "'");
    all_refs.push_back(&refs[i]);
    all_preds.push_back(&preds[i]);
  }

  MetricsReport report;
  report.overall = bundle_over(all_refs, all_preds, kb);

  long long valid = 0, generated = 0;
  for (const DialogPrediction& p : preds) {
    for (const TurnPrediction& t : p.turns) {
      if (!t.has_entity) continue;
      ++generated;
      valid += t.entity_valid ? 1 : 0;
    }
  }
  report.entities_generated = static_cast<int>(generated);
  report.entity_validity = pct(valid, generated);

  std::map<std::string, std::pair<std::vector<const Dialog*>, std::vector<const DialogPrediction*>>>
      by_domain;
  std::pair<std::vector<const Dialog*>, std::vector<const DialogPrediction*>> single, multi;
  for (size_t i = 0; i < refs.size(); ++i) {
    auto& dom = by_domain[refs[i].domain.empty() ? "default" : refs[i].domain];
    dom.first.push_back(&refs[i]);
    dom.second.push_back(&preds[i]);
    const size_t n_match = kb.matching_entities(refs[i].goal).size();
    auto& bucket = n_match == 1 ? single : multi;
    bucket.first.push_back(&refs[i]);
    bucket.second.push_back(&preds[i]);
  }
  for (const auto& [domain, lists] : by_domain) {
    report.per_domain[domain] = bundle_over(lists.first, lists.second, kb);
  }
  report.single_match = bundle_over(single.first, single.second, kb);
  report.multi_match = bundle_over(multi.first, multi.second, kb);
  return report;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json domains = nlohmann::json::object();
  for (const auto& [name, b] : per_domain) domains[name] = b.to_json();
  return nlohmann::json{{"version", 1},
                        {"overall", overall.to_json()},
                        {"entity_validity", round2(entity_validity)},
                        {"entities_generated", entities_generated},
                        {"per_domain", std::move(domains)},
                        {"single_match", single_match.to_json()},
                        {"multi_match", multi_match.to_json()}};
}

}  // namespace eco
