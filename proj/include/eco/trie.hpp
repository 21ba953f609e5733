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

#ifndef ECO_TRIE_H_
#define ECO_TRIE_H_

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eco/kb.hpp"
#include "eco/matrix.hpp"

namespace eco {

// Prefix tree over the linearized forms of every KB entity. Decoding walks
// the tree token by token; at each step only the children of the current
// node may be emitted, so any completed walk is exactly one KB entity.
// Every stored path ends with <eos>, and no path is a prefix of another.
class EntityTrie {
 public:
  static EntityTrie build(const KnowledgeBase& kb, const Vocabulary& vocab);

  // Children of the node reached by `prefix`, ascending token id. Empty
  // only when the prefix already ends with <eos>. Throws on a prefix that
  // is not a path in the tree.
  std::vector<TokenId> allowed_tokens(const TokenSeq& prefix) const;

  bool is_prefix(const TokenSeq& prefix) const;
  // True iff seq is a complete entity linearization (terminal <eos> node).
  bool is_entity(const TokenSeq& seq) const;

  std::vector<TokenSeq> enumerate_paths() const;
  int num_entities() const { return num_entities_; }
  size_t node_count() const { return nodes_.size(); }
  int max_path_len() const { return max_path_len_; }

  // Fingerprint of the KB this trie was built from; consumers refuse to
  // pair the trie with a different KB.
  uint64_t source_kb_hash() const { return source_kb_hash_; }

  nlohmann::json dump(const Vocabulary& vocab) const;

 private:
  struct Node {
    std::map<TokenId, int> children;  // ordered keys give sorted allowed sets
    bool terminal = false;
  };

  int walk(const TokenSeq& prefix) const;  // -1 when not a path
  void insert(const TokenSeq& seq);

  std::vector<Node> nodes_{Node{}};
  int num_entities_ = 0;
  int max_path_len_ = 0;
  uint64_t source_kb_hash_ = 0;
};

// Restriction + renormalization of a probability vector outside any
// gradient context (inference over raw arrays). `allowed` must be strictly
// increasing; mass outside the set becomes exactly zero. Throws when the
// allowed mass falls below 1e-30.
Mat constrain(const Mat& dist, const std::vector<TokenId>& allowed);

}  // namespace eco

#endif  // ECO_TRIE_H_
