// Copyright 2026 The mixdenoise Authors.
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

#include "mixdenoise/language.hpp"

#include <algorithm>
#include <utility>

#include "mixdenoise/error.hpp"

namespace mixdenoise {

bool LanguageId::is_valid(std::string_view code) noexcept {
  if (code.size() < 2 || code.size() > 3) return false;
  return std::all_of(code.begin(), code.end(),
                     [](char c) { return c >= 'a' && c <= 'z'; });
}

LanguageId::LanguageId(std::string code) : code_(std::move(code)) {
  if (!is_valid(code_)) {
    throw ConfigError("invalid language code '" + code_ +
                      "' (expected 2-3 lowercase letters)");
  }
}

Direction::Direction(LanguageId source, LanguageId target)
    : src(std::move(source)), tgt(std::move(target)) {
  if (src == tgt) {
    throw ConfigError("direction source and target are both '" + src.code() +
                      "'");
  }
}

Direction Direction::parse(std::string_view key) {
  const auto dash = key.find('-');
  if (dash == std::string_view::npos) {
    throw ConfigError("invalid direction '" + std::string(key) +
                      "' (expected src-tgt)");
  }
  return Direction(LanguageId(std::string(key.substr(0, dash))),
                   LanguageId(std::string(key.substr(dash + 1))));
}

}  // namespace mixdenoise
