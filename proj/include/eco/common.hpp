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

#ifndef ECO_COMMON_H_
#define ECO_COMMON_H_

#include <sstream>
#include <stdexcept>
#include <string>

namespace eco {

// All recoverable failures (bad inputs, malformed files, contract violations)
// surface as eco::Error so callers can attribute them to a pipeline stage.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace eco

// Checks a contract; the message is an ostream expression.
#define ECO_CHECK(cond, msg)                  \
  do {                                        \
    if (!(cond)) {                            \
      std::ostringstream eco_check_os_;       \
      eco_check_os_ << msg;                   \
      throw ::eco::Error(eco_check_os_.str()); \
    }                                         \
  } while (0)

#endif  // ECO_COMMON_H_
