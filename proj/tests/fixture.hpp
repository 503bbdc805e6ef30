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

// Shared test helpers: scratch directories and a synthetic multilingual
// corpus with full-coverage word dictionaries.

#ifndef MIXDENOISE_TESTS_FIXTURE_HPP_
#define MIXDENOISE_TESTS_FIXTURE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mixdenoise::testing {

// Removed with its contents on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

struct SyntheticSpec {
  std::vector<std::string> languages{"de", "en", "fr"};
  // Sentences per language; missing languages get none.
  std::map<std::string, std::size_t> mono{{"en", 600}, {"de", 300}, {"fr", 150}};
  // "src-tgt" -> pairs.
  std::map<std::string, std::size_t> bitext{
      {"en-de", 200}, {"de-en", 100}, {"en-fr", 120}, {"fr-en", 60}};
  std::size_t lexicon = 150;   // word types per language
  std::size_t min_words = 3;
  std::size_t max_words = 14;
  // Every this many mono lines, one line longer than `long_words` is added;
  // 0 disables.
  std::size_t long_every = 0;
  std::size_t long_words = 80;
  bool dictionaries = true;
  std::uint64_t seed = 11;
};

// Word `i` of `lang` is "<lang><i>"; dictionaries map it to "<other><i>" for
// every ordered language pair, so coverage is total. Writes config.json and
// returns its parsed content (paths relative to `dir`).
nlohmann::json make_synthetic_corpus(const std::filesystem::path& dir,
                                     const SyntheticSpec& spec = {});

}  // namespace mixdenoise::testing

#endif  // MIXDENOISE_TESTS_FIXTURE_HPP_
