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

#include "eco/kb.hpp"

#include <algorithm>
#include <cctype>

#include "eco/jsonio.hpp"

namespace eco {

namespace {

const char* kReservedWords[] = {"<pad>", "<bos>", "<eos>", "<unk>"};

bool is_reserved_word(const std::string& w) {
  for (const char* r : kReservedWords) {
    if (w == r) return true;
  }
  return false;
}

uint64_t fnv1a(const std::string& s, uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Words split_words(const std::string& text) {
  Words out;
  std::string cur;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string join_words(const Words& words) {
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::string normalize(const std::string& text) { return join_words(split_words(text)); }

int AttributeSchema::index_of(const std::string& attr) const {
  for (size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i] == attr) return static_cast<int>(i);
  }
  return -1;
}

const std::string& Entity::value(const std::string& attr) const {
  auto it = values.find(attr);
  ECO_CHECK(it != values.end(), "entity " << id << " has no attribute '" << attr << "'");
  return it->second;
}

bool Entity::has_value(const std::string& attr) const {
  auto it = values.find(attr);
  return it != values.end() && it->second != kNoneValue;
}

UserGoal UserGoal::from_json(const nlohmann::json& j) {
  ECO_CHECK(j.is_object(), "goal must be a JSON object");
  UserGoal g;
  if (j.contains("constraints")) {
    ECO_CHECK(j["constraints"].is_object(), "goal constraints must be an object");
    for (auto it = j["constraints"].begin(); it != j["constraints"].end(); ++it) {
      ECO_CHECK(it.value().is_string(), "goal constraint values must be strings");
      g.constraints[normalize(it.key())] = normalize(it.value().get<std::string>());
    }
  }
  if (j.contains("requests")) {
    ECO_CHECK(j["requests"].is_array(), "goal requests must be an array");
    for (const auto& r : j["requests"]) {
      ECO_CHECK(r.is_string(), "goal requests must be strings");
      g.requests.push_back(normalize(r.get<std::string>()));
    }
  }
  return g;
}

nlohmann::json UserGoal::to_json() const {
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [a, v] : constraints) c[a] = v;
  return nlohmann::json{{"constraints", c}, {"requests", requests}};
}

bool goal_matches(const Entity& e, const UserGoal& g) {
  for (const auto& [attr, want] : g.constraints) {
    auto it = e.values.find(attr);
    if (it == e.values.end() || it->second != want) return false;
  }
  return true;
}

KnowledgeBase::KnowledgeBase(AttributeSchema schema, std::vector<Entity> entities)
    : schema_(std::move(schema)), entities_(std::move(entities)) {
  validate();
  build_lexicon();
  compute_fingerprint();
}

void KnowledgeBase::validate() const {
  ECO_CHECK(!schema_.attributes.empty(), "schema has no attributes");
  ECO_CHECK(!entities_.empty(), "knowledge base has no entities");
  std::set<std::string> seen_attrs;
  for (const std::string& a : schema_.attributes) {
    ECO_CHECK(!a.empty(), "schema attribute is empty");
    ECO_CHECK(a == normalize(a) && split_words(a).size() == 1,
              "schema attribute '" << a << "' must be a single lowercase word");
    ECO_CHECK(seen_attrs.insert(a).second, "duplicate schema attribute '" << a << "'");
  }
  ECO_CHECK(schema_.contains("name"), "schema must include the 'name' attribute");

  std::set<std::string> seen_names;
  for (size_t i = 0; i < entities_.size(); ++i) {
    const Entity& e = entities_[i];
    ECO_CHECK(e.id == static_cast<int>(i), "entity id " << e.id << " out of order");
    ECO_CHECK(e.values.size() == schema_.attributes.size(),
              "entity " << e.id << " does not match the schema");
    for (const auto& [attr, value] : e.values) {
      ECO_CHECK(schema_.contains(attr),
                "entity " << e.id << " has attribute '" << attr << "' absent from schema");
      ECO_CHECK(value == normalize(value), "entity " << e.id << " value not normalized");
      ECO_CHECK(!value.empty(), "entity " << e.id << " has empty value for '" << attr
                                          << "' (use '" << kNoneValue << "')");
      for (const std::string& w : split_words(value)) {
        ECO_CHECK(!is_reserved_word(w) && w.front() != '[',
                  "entity " << e.id << " value word '" << w << "' collides with a control token");
      }
    }
    const std::string& name = e.value("name");
    ECO_CHECK(name != kNoneValue, "entity " << e.id << " has no name");
    ECO_CHECK(seen_names.insert(name).second, "duplicate entity name '" << name << "'");
  }
}

void KnowledgeBase::build_lexicon() {
  // Schema-attribute order first, then lexicographic values inside an
  // attribute, deduplicated. Built once; the KB is immutable afterwards.
  for (const std::string& attr : schema_.attributes) {
    std::set<std::string> values;
    for (const Entity& e : entities_) {
      const std::string& v = e.value(attr);
      if (v != kNoneValue) values.insert(v);
    }
    for (const std::string& v : values) {
      lexicon_.push_back(LexiconEntry{attr, split_words(v)});
    }
  }
}

void KnowledgeBase::compute_fingerprint() {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const std::string& a : schema_.attributes) h = fnv1a(a + ";", h);
  h = fnv1a("|", h);
  for (const Entity& e : entities_) {
    for (const std::string& a : schema_.attributes) h = fnv1a(a + "=" + e.value(a) + ";", h);
    h = fnv1a("|", h);
  }
  fingerprint_ = h;
}

const Entity& KnowledgeBase::entity(int id) const {
  ECO_CHECK(id >= 0 && id < size(), "entity id " << id << " out of range");
  return entities_[id];
}

bool KnowledgeBase::lexicon_contains(const std::string& attr, const Words& value) const {
  for (const LexiconEntry& le : lexicon_) {
    if (le.attribute == attr && le.value == value) return true;
  }
  return false;
}

std::vector<int> KnowledgeBase::matching_entities(const UserGoal& g) const {
  std::vector<int> out;
  for (const Entity& e : entities_) {
    if (goal_matches(e, g)) out.push_back(e.id);
  }
  return out;
}

KnowledgeBase KnowledgeBase::from_json(const nlohmann::json& j) {
  ECO_CHECK(j.is_object() && j.contains("schema") && j.contains("entities"),
            "knowledge base JSON must have 'schema' and 'entities'");
  AttributeSchema schema;
  for (const auto& a : j["schema"]) {
    ECO_CHECK(a.is_string(), "schema attributes must be strings");
    schema.attributes.push_back(a.get<std::string>());
  }
  std::vector<Entity> entities;
  for (const auto& ej : j["entities"]) {
    ECO_CHECK(ej.is_object(), "entities must be JSON objects");
    Entity e;
    e.id = static_cast<int>(entities.size());
    for (const std::string& attr : schema.attributes) e.values[attr] = kNoneValue;
    for (auto it = ej.begin(); it != ej.end(); ++it) {
      const std::string attr = normalize(it.key());
      ECO_CHECK(schema.contains(attr),
                "entity " << e.id << " has attribute '" << attr << "' absent from schema");
      ECO_CHECK(it.value().is_string(), "entity values must be strings");
      e.values[attr] = normalize(it.value().get<std::string>());
    }
    entities.push_back(std::move(e));
  }
  return KnowledgeBase(std::move(schema), std::move(entities));
}

nlohmann::json KnowledgeBase::to_json() const {
  nlohmann::json ents = nlohmann::json::array();
  for (const Entity& e : entities_) {
    nlohmann::json ej = nlohmann::json::object();
    for (const std::string& attr : schema_.attributes) ej[attr] = e.value(attr);
    ents.push_back(std::move(ej));
  }
  return nlohmann::json{
      {"version", 1}, {"schema", schema_.attributes}, {"entities", std::move(ents)}};
}

KnowledgeBase KnowledgeBase::load_file(const std::string& path) {
  return from_json(read_json_file(path));
}

void KnowledgeBase::save_file(const std::string& path) const {
  write_json_file(path, to_json());
}

Vocabulary Vocabulary::build(const KnowledgeBase& kb, const std::vector<std::string>& texts) {
  Vocabulary v;
  v.words_ = {"<pad>", "<bos>", "<eos>", "<unk>"};
  std::set<std::string> open;
  for (const std::string& attr : kb.schema().attributes) {
    v.words_.push_back(AttributeSchema::placeholder(attr));
  }
  for (const Entity& e : kb.entities()) {
    for (const auto& [attr, value] : e.values) {
      for (const std::string& w : split_words(value)) open.insert(w);
    }
  }
  for (const std::string& t : texts) {
    for (const std::string& w : split_words(t)) open.insert(w);
  }
  for (const std::string& w : open) {
    if (!is_reserved_word(w) && w.front() != '[') v.words_.push_back(w);
  }
  v.index();
  return v;
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  ECO_CHECK(words.size() >= 4 && words[kPad] == "<pad>" && words[kBos] == "<bos>" &&
                words[kEos] == "<eos>" && words[kUnk] == "<unk>",
            "vocabulary word list does not start with the reserved tokens");
  Vocabulary v;
  v.words_ = std::move(words);
  v.index();
  return v;
}

void Vocabulary::index() {
  ids_.clear();
  for (size_t i = 0; i < words_.size(); ++i) {
    ECO_CHECK(ids_.emplace(words_[i], static_cast<TokenId>(i)).second,
              "duplicate vocabulary word '" << words_[i] << "'");
  }
}

TokenId Vocabulary::id_of(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::word_of(TokenId id) const {
  ECO_CHECK(id >= 0 && id < size(), "token id " << id << " out of range");
  return words_[id];
}

bool Vocabulary::contains(const std::string& word) const { return ids_.count(word) > 0; }

TokenId Vocabulary::placeholder_id(const std::string& attr) const {
  TokenId id = id_of(AttributeSchema::placeholder(attr));
  ECO_CHECK(id != kUnk, "no placeholder token for attribute '" << attr << "'");
  return id;
}

TokenSeq tokenize(const std::string& text, const Vocabulary& vocab) {
  return to_ids(split_words(text), vocab);
}

TokenSeq to_ids(const Words& words, const Vocabulary& vocab) {
  TokenSeq out;
  out.reserve(words.size());
  for (const std::string& w : words) out.push_back(vocab.id_of(w));
  return out;
}

Words to_words(const TokenSeq& ids, const Vocabulary& vocab) {
  Words out;
  out.reserve(ids.size());
  for (TokenId id : ids) out.push_back(vocab.word_of(id));
  return out;
}

std::string detokenize(const TokenSeq& ids, const Vocabulary& vocab) {
  return join_words(to_words(ids, vocab));
}

TokenSeq linearize_entity(const Entity& e, const AttributeSchema& schema,
                          const Vocabulary& vocab) {
  TokenSeq out;
  for (const std::string& attr : schema.attributes) {
    auto it = e.values.find(attr);
    ECO_CHECK(it != e.values.end(),
              "entity " << e.id << " is missing schema attribute '" << attr << "'");
    out.push_back(vocab.placeholder_id(attr));
    for (const std::string& w : split_words(it->second)) {
      TokenId id = vocab.id_of(w);
      ECO_CHECK(id != Vocabulary::kUnk,
                "entity value word '" << w << "' is not in the vocabulary");
      out.push_back(id);
    }
  }
  out.push_back(Vocabulary::kEos);
  return out;
}

Words linearize_entity_words(const Entity& e, const AttributeSchema& schema) {
  Words out;
  for (const std::string& attr : schema.attributes) {
    auto it = e.values.find(attr);
    ECO_CHECK(it != e.values.end(),
              "entity " << e.id << " is missing schema attribute '" << attr << "'");
    out.push_back(AttributeSchema::placeholder(attr));
    for (const std::string& w : split_words(it->second)) out.push_back(w);
  }
  return out;
}

}  // namespace eco
