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

#include "eco/synth.hpp"

#include <algorithm>
#include <filesystem>

#include "eco/rng.hpp"

namespace eco {

namespace {

// All value words are disjoint from the surface phrasing below, so value
// mentions appear exactly where spans say they do; greedy extraction then
// recovers precisely the annotated pairs.
const std::vector<std::string> kNameAdjectives = {
    "golden", "silver", "crimson", "emerald", "amber",  "ivory",
    "copper", "scarlet", "cobalt",  "onyx",    "coral",  "jade"};
const std::vector<std::string> kNameNouns = {
    "kitchen", "palace",  "garden", "corner",  "pantry",  "terrace",
    "hearth",  "parlour", "arbour", "cellar",  "veranda", "courtyard"};

struct AttributePool {
  const char* attribute;
  std::vector<std::string> values;
};

const std::vector<AttributePool>& attribute_pools() {
  static const std::vector<AttributePool> pools = {
      {"area",
       {"north", "south", "east", "west", "centre", "riverside", "uptown", "harbourside",
        "midtown", "outskirts"}},
      {"food",
       {"italian", "chinese", "indian", "thai", "british", "mexican", "korean", "lebanese",
        "north american", "japanese"}},
      {"price",
       {"cheap", "moderate", "expensive", "premium", "budget", "lavish", "thrifty", "upscale",
        "bargain", "steep"}},
      {"venue",
       {"diner", "brasserie", "tavern", "grill", "buffet", "bakehouse", "pub", "cantina",
        "trattoria", "smokehouse"}},
      {"rating",
       {"superb", "decent", "mediocre", "stellar", "passable", "flawless", "rough", "polished",
        "shabby", "glowing"}},
      {"music",
       {"jazz", "folk", "opera", "blues", "reggae", "techno", "swing", "ragtime", "disco",
        "funk"}}};
  return pools;
}

const std::set<std::string>& surface_words() {
  static const std::set<std::string> words = {
      "hello", "hi",      "i",      "am",    "looking", "for",  "a",       "spot",
      "with",  "and",     "please", "find",  "me",      "want", "you",     "could",
      "try",   "it",      "has",    "would", "suit",    "offers", "consider", "which",
      "what",  "is",      "the",    "of",    "tell",    "thank", "thanks",  "goodbye",
      "are",   "welcome", "glad",   "to",    "help"};
  return words;
}

// Appends tokens to one side of a turn, recording spans for value slots.
struct SideBuilder {
  Words words;
  std::vector<Span> spans;
  Span::Side side;

  explicit SideBuilder(Span::Side s) : side(s) {}

  void say(const std::string& text) {
    Words w = split_words(text);
    words.insert(words.end(), w.begin(), w.end());
  }

  void value(const std::string& attr, const std::string& val) {
    Span s;
    s.side = side;
    s.attribute = attr;
    s.start = static_cast<int>(words.size());
    say(val);
    s.end = static_cast<int>(words.size());
    spans.push_back(s);
  }
};

DialogTurn make_turn(SideBuilder user, SideBuilder response) {
  DialogTurn t;
  t.user = std::move(user.words);
  t.response = std::move(response.words);
  t.spans = std::move(user.spans);
  t.spans.insert(t.spans.end(), response.spans.begin(), response.spans.end());
  return t;
}

Dialog build_dialog(const Entity& e, const AttributeSchema& schema, const std::string& id,
                    const std::string& domain, Rng& rng) {
  std::vector<std::string> avail;
  for (const std::string& attr : schema.attributes) {
    if (attr != "name" && e.has_value(attr)) avail.push_back(attr);
  }
  ECO_CHECK(avail.size() >= 2, "entity " << e.id << " has too few filled attributes");
  rng.shuffle(avail);

  const int nc = (avail.size() >= 3 && rng.uniform() < 0.4) ? 2 : 1;
  const int nr =
      std::min<int>(static_cast<int>(avail.size()) - nc, rng.uniform() < 0.5 ? 2 : 1);
  std::vector<std::string> constraints(avail.begin(), avail.begin() + nc);
  std::vector<std::string> requests(avail.begin() + nc, avail.begin() + nc + nr);

  Dialog d;
  d.id = id;
  d.domain = domain;
  d.meta_source_entity = e.id;
  for (const std::string& attr : constraints) d.goal.constraints[attr] = e.value(attr);
  d.goal.requests = requests;
  const std::string& name = e.value("name");

  {
    SideBuilder user(Span::Side::kUser);
    switch (rng.uniform_int(3)) {
      case 0: user.say("hello i am looking for a spot with"); break;
      case 1: user.say("hi please find me a spot with"); break;
      default: user.say("i want a spot with"); break;
    }
    user.say(constraints[0]);
    user.value(constraints[0], e.value(constraints[0]));
    for (size_t i = 1; i < constraints.size(); ++i) {
      user.say("and " + constraints[i]);
      user.value(constraints[i], e.value(constraints[i]));
    }

    SideBuilder resp(Span::Side::kResponse);
    switch (rng.uniform_int(3)) {
      case 0:
        resp.say("you could try");
        resp.value("name", name);
        resp.say("it has " + constraints[0]);
        resp.value(constraints[0], e.value(constraints[0]));
        break;
      case 1:
        resp.value("name", name);
        resp.say("would suit you it offers " + constraints[0]);
        resp.value(constraints[0], e.value(constraints[0]));
        break;
      default:
        resp.say("consider");
        resp.value("name", name);
        resp.say("which has " + constraints[0]);
        resp.value(constraints[0], e.value(constraints[0]));
        break;
    }
    d.turns.push_back(make_turn(std::move(user), std::move(resp)));
  }

  for (const std::string& attr : requests) {
    SideBuilder user(Span::Side::kUser);
    if (rng.uniform_int(2) == 0) {
      user.say("what is the " + attr + " of");
      user.value("name", name);
    } else {
      user.say("tell me the " + attr + " of");
      user.value("name", name);
    }

    SideBuilder resp(Span::Side::kResponse);
    if (rng.uniform_int(2) == 0) {
      resp.say("the " + attr + " of");
      resp.value("name", name);
      resp.say("is");
      resp.value(attr, e.value(attr));
    } else {
      resp.value("name", name);
      resp.say("has " + attr);
      resp.value(attr, e.value(attr));
    }
    d.turns.push_back(make_turn(std::move(user), std::move(resp)));
  }

  if (rng.uniform() < 0.5) {
    SideBuilder user(Span::Side::kUser);
    user.say(rng.uniform_int(2) == 0 ? "thank you goodbye" : "thanks goodbye");
    SideBuilder resp(Span::Side::kResponse);
    resp.say(rng.uniform_int(2) == 0 ? "you are welcome goodbye" : "glad to help goodbye");
    d.turns.push_back(make_turn(std::move(user), std::move(resp)));
  }
  return d;
}

std::string pad4(int n) {
  std::string s = std::to_string(n);
  while (s.size() < 4) s.insert(s.begin(), '0');
  return s;
}

void check_word_disjointness(int attributes) {
  std::set<std::string> value_words;
  for (const std::string& w : kNameAdjectives) value_words.insert(w);
  for (const std::string& w : kNameNouns) value_words.insert(w);
  for (int i = 0; i < attributes - 1; ++i) {
    for (const std::string& v : attribute_pools()[i].values) {
      for (const std::string& w : split_words(v)) value_words.insert(w);
    }
  }
  for (const std::string& w : surface_words()) {
    ECO_CHECK(!value_words.count(w),
              "surface word '" << w << "' collides with a value word");
  }
  for (int i = 0; i < attributes - 1; ++i) {
    ECO_CHECK(!value_words.count(attribute_pools()[i].attribute),
              "attribute name collides with a value word");
  }
}

}  // namespace

nlohmann::json SyntheticSpec::to_json() const {
  return nlohmann::json{{"entities", entities},
                        {"attributes", attributes},
                        {"value_pool", value_pool},
                        {"train_dialogs", train_dialogs},
                        {"dev_dialogs", dev_dialogs},
                        {"test_dialogs", test_dialogs},
                        {"seed", seed},
                        {"domain", domain},
                        {"none_rate", none_rate}};
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  s.entities = j.value("entities", s.entities);
  s.attributes = j.value("attributes", s.attributes);
  s.value_pool = j.value("value_pool", s.value_pool);
  s.train_dialogs = j.value("train_dialogs", s.train_dialogs);
  s.dev_dialogs = j.value("dev_dialogs", s.dev_dialogs);
  s.test_dialogs = j.value("test_dialogs", s.test_dialogs);
  s.seed = j.value("seed", s.seed);
  s.domain = j.value("domain", s.domain);
  s.none_rate = j.value("none_rate", s.none_rate);
  return s;
}

SyntheticCorpus synth_corpus(const SyntheticSpec& spec) {
  const int max_names = static_cast<int>(kNameAdjectives.size() * kNameNouns.size());
  ECO_CHECK(spec.entities >= 2 && spec.entities <= max_names,
            "entities must be in [2, " << max_names << "]");
  ECO_CHECK(spec.attributes >= 3 &&
                spec.attributes <= 1 + static_cast<int>(attribute_pools().size()),
            "attributes must be in [3, " << 1 + attribute_pools().size() << "]");
  ECO_CHECK(spec.value_pool >= 2 && spec.value_pool <= 10, "value_pool must be in [2, 10]");
  ECO_CHECK(spec.none_rate >= 0.0 && spec.none_rate < 1.0, "none_rate must be in [0, 1)");
  check_word_disjointness(spec.attributes);

  Rng root(mix_seed(spec.seed, 0x5f1e));

  AttributeSchema schema;
  schema.attributes.push_back("name");
  for (int i = 0; i < spec.attributes - 1; ++i) {
    schema.attributes.push_back(attribute_pools()[i].attribute);
  }

  // Unique two-word names: all combinations shuffled, first n taken.
  std::vector<std::string> names;
  names.reserve(max_names);
  for (const std::string& adj : kNameAdjectives) {
    for (const std::string& noun : kNameNouns) names.push_back(adj + " " + noun);
  }
  Rng name_rng = root.fork(1);
  name_rng.shuffle(names);

  Rng kb_rng = root.fork(2);
  std::vector<Entity> entities;
  for (int i = 0; i < spec.entities; ++i) {
    Entity e;
    e.id = i;
    e.values["name"] = names[i];
    for (int a = 0; a < spec.attributes - 1; ++a) {
      const AttributePool& pool = attribute_pools()[a];
      e.values[pool.attribute] =
          pool.values[static_cast<size_t>(kb_rng.uniform_int(spec.value_pool))];
    }
    // At most one missing attribute, and only when enough remain filled
    // for a constraint plus a request.
    if (spec.attributes >= 4 && kb_rng.uniform() < spec.none_rate) {
      const int which = static_cast<int>(kb_rng.uniform_int(spec.attributes - 1));
      e.values[attribute_pools()[which].attribute] = kNoneValue;
    }
    entities.push_back(std::move(e));
  }

  SyntheticCorpus corpus{KnowledgeBase(schema, std::move(entities)), {}, {}, {}};

  struct SplitPlan {
    const char* prefix;
    int count;
    std::vector<Dialog>* out;
  };
  SplitPlan plans[] = {{"train", spec.train_dialogs, &corpus.train},
                       {"dev", spec.dev_dialogs, &corpus.dev},
                       {"test", spec.test_dialogs, &corpus.test}};
  for (size_t pi = 0; pi < 3; ++pi) {
    Rng split_rng = root.fork(100 + pi);
    for (int i = 0; i < plans[pi].count; ++i) {
      const Entity& e =
          corpus.kb.entity(static_cast<int>(split_rng.uniform_int(corpus.kb.size())));
      const std::string id = std::string(plans[pi].prefix) + "-" + pad4(i);
      plans[pi].out->push_back(build_dialog(e, corpus.kb.schema(), id, spec.domain, split_rng));
    }
  }
  return corpus;
}

void write_corpus(const SyntheticCorpus& corpus, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  corpus.kb.save_file(out_dir + "/kb.json");
  save_dialogs(out_dir + "/train.jsonl", corpus.train);
  save_dialogs(out_dir + "/dev.jsonl", corpus.dev);
  save_dialogs(out_dir + "/test.jsonl", corpus.test);
  std::vector<UserGoal> goals;
  for (const Dialog& d : corpus.test) goals.push_back(d.goal);
  save_goals(out_dir + "/goals.json", goals);
}

}  // namespace eco
