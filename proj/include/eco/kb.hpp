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

#ifndef ECO_KB_H_
#define ECO_KB_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "eco/common.hpp"

namespace eco {

using TokenId = int;
using TokenSeq = std::vector<TokenId>;
using Words = std::vector<std::string>;

// Attribute slots are missing, never absent keys: an entity that lacks a
// value carries this sentinel. The sentinel never enters the value lexicon.
inline constexpr const char* kNoneValue = "none";

// Lowercases ASCII letters and splits on whitespace. This is the single
// tokenization used everywhere: corpus text, KB values, goals.
Words split_words(const std::string& text);

// split_words joined by single spaces (the canonical surface form).
std::string join_words(const Words& words);
std::string normalize(const std::string& text);

struct AttributeSchema {
  std::vector<std::string> attributes;  // fixed order, drives linearization

  int index_of(const std::string& attr) const;
  bool contains(const std::string& attr) const { return index_of(attr) >= 0; }
  static std::string placeholder(const std::string& attr) { return "[" + attr + "]"; }
};

struct Entity {
  int id = -1;
  // attr -> normalized value string; keys are exactly the schema attributes.
  std::map<std::string, std::string> values;

  const std::string& value(const std::string& attr) const;
  bool has_value(const std::string& attr) const;  // present and not the sentinel
};

struct UserGoal {
  std::map<std::string, std::string> constraints;  // attr -> required value
  std::vector<std::string> requests;               // attrs the user asks for

  static UserGoal from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Entity e satisfies goal g iff every constraint value equals e's value for
// that attribute after normalization.
bool goal_matches(const Entity& e, const UserGoal& g);

struct LexiconEntry {
  std::string attribute;
  Words value;  // tokenized value, at least one word
};

class KnowledgeBase {
 public:
  KnowledgeBase(AttributeSchema schema, std::vector<Entity> entities);

  static KnowledgeBase from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static KnowledgeBase load_file(const std::string& path);
  void save_file(const std::string& path) const;

  const AttributeSchema& schema() const { return schema_; }
  const std::vector<Entity>& entities() const { return entities_; }
  const Entity& entity(int id) const;
  int size() const { return static_cast<int>(entities_.size()); }

  // Union over entities of (attribute, tokenized value), sentinel excluded,
  // deduplicated, ordered by schema attribute then value. Immutable after
  // construction because the KB itself is.
  const std::vector<LexiconEntry>& value_lexicon() const { return lexicon_; }
  bool lexicon_contains(const std::string& attr, const Words& value) const;

  std::vector<int> matching_entities(const UserGoal& g) const;

  // Stable digest of schema plus entity contents; ties a trie or checkpoint
  // to the KB it was built from.
  uint64_t fingerprint() const { return fingerprint_; }

 private:
  void validate() const;
  void build_lexicon();
  void compute_fingerprint();

  AttributeSchema schema_;
  std::vector<Entity> entities_;
  std::vector<LexiconEntry> lexicon_;
  uint64_t fingerprint_ = 0;
};

// Token id space: reserved control tokens, then attribute placeholders in
// schema order, then the sorted union of KB value words and corpus words.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr TokenId kUnk = 3;

  static Vocabulary build(const KnowledgeBase& kb, const std::vector<std::string>& texts);

  TokenId id_of(const std::string& word) const;  // kUnk when absent
  const std::string& word_of(TokenId id) const;
  bool contains(const std::string& word) const;
  int size() const { return static_cast<int>(words_.size()); }
  TokenId placeholder_id(const std::string& attr) const;

  const std::vector<std::string>& words() const { return words_; }
  // Rebuilds the id maps from an explicit word list (checkpoint restore).
  static Vocabulary from_words(std::vector<std::string> words);

 private:
  Vocabulary() = default;
  void index();

  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> ids_;
};

TokenSeq tokenize(const std::string& text, const Vocabulary& vocab);
TokenSeq to_ids(const Words& words, const Vocabulary& vocab);
Words to_words(const TokenSeq& ids, const Vocabulary& vocab);
std::string detokenize(const TokenSeq& ids, const Vocabulary& vocab);

// Flat form fed to the entity decoder and the trie:
//   [attr_1] value_1 words ... [attr_K] value_K words <eos>
// in schema order. Distinct entities always linearize distinctly because
// the name attribute is unique.
TokenSeq linearize_entity(const Entity& e, const AttributeSchema& schema,
                          const Vocabulary& vocab);
Words linearize_entity_words(const Entity& e, const AttributeSchema& schema);

}  // namespace eco

#endif  // ECO_KB_H_
