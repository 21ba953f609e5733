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

#include "eco/jsonio.hpp"

#include <fstream>
#include <sstream>

#include "eco/common.hpp"

namespace eco {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  ECO_CHECK(in.good(), "cannot open file for reading: " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  ECO_CHECK(out.good(), "cannot open file for writing: " << path);
  out << text;
  ECO_CHECK(out.good(), "write failed: " << path);
}

nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  ECO_CHECK(!j.is_discarded(), "malformed JSON in " << path);
  return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<nlohmann::json> read_jsonl_file(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<nlohmann::json> out;
  std::istringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    ECO_CHECK(!j.is_discarded(), "malformed JSON at " << path << ":" << lineno);
    out.push_back(std::move(j));
  }
  return out;
}

void write_jsonl_file(const std::string& path, const std::vector<nlohmann::json>& lines) {
  std::ostringstream ss;
  for (const auto& j : lines) ss << j.dump() << "\n";
  write_text_file(path, ss.str());
}

}  // namespace eco
