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

#ifndef ECO_JSONIO_H_
#define ECO_JSONIO_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace eco {

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// JSONL helpers; write_jsonl emits one compact object per line.
std::vector<nlohmann::json> read_jsonl_file(const std::string& path);
void write_jsonl_file(const std::string& path, const std::vector<nlohmann::json>& lines);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace eco

#endif  // ECO_JSONIO_H_
