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

#ifndef MIXDENOISE_LANGUAGE_HPP_
#define MIXDENOISE_LANGUAGE_HPP_

#include <compare>
#include <string>
#include <string_view>

namespace mixdenoise {

// Lowercase ISO-639-1/3 language code ("en", "ne", "eus").
class LanguageId {
 public:
  // Throws ConfigError unless `code` matches [a-z]{2,3}.
  explicit LanguageId(std::string code);

  const std::string& code() const noexcept { return code_; }

  static bool is_valid(std::string_view code) noexcept;

  friend auto operator<=>(const LanguageId&, const LanguageId&) = default;
  friend bool operator==(const LanguageId&, const LanguageId&) = default;

 private:
  std::string code_;
};

// A translation direction src -> tgt. Serialized as "src-tgt".
struct Direction {
  LanguageId src;
  LanguageId tgt;

  // Throws ConfigError when src == tgt.
  Direction(LanguageId source, LanguageId target);

  std::string key() const { return src.code() + "-" + tgt.code(); }
  static Direction parse(std::string_view key);

  friend auto operator<=>(const Direction&, const Direction&) = default;
  friend bool operator==(const Direction&, const Direction&) = default;
};

}  // namespace mixdenoise

#endif  // MIXDENOISE_LANGUAGE_HPP_
