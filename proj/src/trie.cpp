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

#include "eco/trie.hpp"

#include <algorithm>

namespace eco {

EntityTrie EntityTrie::build(const KnowledgeBase& kb, const Vocabulary& vocab) {
  ECO_CHECK(kb.size() > 0, "trie: knowledge base has no entities");
  EntityTrie t;
  t.source_kb_hash_ = kb.fingerprint();
  for (const Entity& e : kb.entities()) {
    t.insert(linearize_entity(e, kb.schema(), vocab));
  }
  ECO_CHECK(t.num_entities_ == kb.size(), "trie: path count does not match entity count");
  return t;
}

void EntityTrie::insert(const TokenSeq& seq) {
  ECO_CHECK(!seq.empty() && seq.back() == Vocabulary::kEos,
            "trie: linearization must end with <eos>");
  int cur = 0;
  for (size_t i = 0; i < seq.size(); ++i) {
    ECO_CHECK(!nodes_[cur].terminal,
              "trie: an existing entity is a strict prefix of another");
    ECO_CHECK(i + 1 == seq.size() || seq[i] != Vocabulary::kEos,
              "trie: <eos> inside a linearization");
    auto [it, inserted] = nodes_[cur].children.emplace(seq[i], 0);
    if (inserted) {
      it->second = static_cast<int>(nodes_.size());
      nodes_.push_back(Node{});
    }
    cur = it->second;
  }
  ECO_CHECK(!nodes_[cur].terminal && nodes_[cur].children.empty(),
            "trie: duplicate entity linearization");
  nodes_[cur].terminal = true;
  ++num_entities_;
  max_path_len_ = std::max(max_path_len_, static_cast<int>(seq.size()));
}

int EntityTrie::walk(const TokenSeq& prefix) const {
  int cur = 0;
  for (TokenId t : prefix) {
    auto it = nodes_[cur].children.find(t);
    if (it == nodes_[cur].children.end()) return -1;
    cur = it->second;
  }
  return cur;
}

std::vector<TokenId> EntityTrie::allowed_tokens(const TokenSeq& prefix) const {
  int node = walk(prefix);
  ECO_CHECK(node >= 0, "trie: prefix of length " << prefix.size() << " is not a valid path");
  std::vector<TokenId> out;
  out.reserve(nodes_[node].children.size());
  for (const auto& [tok, child] : nodes_[node].children) out.push_back(tok);
  return out;
}

bool EntityTrie::is_prefix(const TokenSeq& prefix) const { return walk(prefix) >= 0; }

bool EntityTrie::is_entity(const TokenSeq& seq) const {
  int node = walk(seq);
  return node >= 0 && nodes_[node].terminal;
}

std::vector<TokenSeq> EntityTrie::enumerate_paths() const {
  std::vector<TokenSeq> out;
  TokenSeq path;
  // Iterative DFS; child maps are ordered, so enumeration is deterministic.
  struct Frame {
    int node;
    std::map<TokenId, int>::const_iterator it;
  };
  std::vector<Frame> stack{{0, nodes_[0].children.begin()}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (nodes_[f.node].terminal) out.push_back(path);
    if (f.it == nodes_[f.node].children.end()) {
      stack.pop_back();
      if (!path.empty()) path.pop_back();
      continue;
    }
    int child = f.it->second;
    path.push_back(f.it->first);
    ++f.it;
    stack.push_back(Frame{child, nodes_[child].children.begin()});
  }
  return out;
}

nlohmann::json EntityTrie::dump(const Vocabulary& vocab) const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : nodes_) {
    nlohmann::json children = nlohmann::json::object();
    for (const auto& [tok, child] : n.children) children[vocab.word_of(tok)] = child;
    nodes.push_back(nlohmann::json{{"children", std::move(children)}, {"terminal", n.terminal}});
  }
  return nlohmann::json{{"version", 1},
                        {"kb_fingerprint", source_kb_hash_},
                        {"entities", num_entities_},
                        {"nodes", std::move(nodes)}};
}

Mat constrain(const Mat& dist, const std::vector<TokenId>& allowed) {
  ECO_CHECK(dist.is_vector(), "constrain: expects a column vector");
  ECO_CHECK(!allowed.empty(), "constrain: empty allowed set");
  double z = 0.0;
  int prev = -1;
  for (TokenId k : allowed) {
    ECO_CHECK(k > prev, "constrain: allowed set must be strictly increasing");
    ECO_CHECK(k >= 0 && k < dist.rows, "constrain: index " << k << " out of range");
    z += dist.a[k];
    prev = k;
  }
  ECO_CHECK(z >= 1e-30, "constrain: degenerate distribution, allowed mass " << z);
  Mat out(dist.rows, 1);
  for (TokenId k : allowed) out.a[k] = dist.a[k] / z;
  return out;
}

}  // namespace eco
