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


#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixture.hpp"
#include "mixdenoise/corpus_io.hpp"
#include "mixdenoise/error.hpp"

using namespace mixdenoise;
using mixdenoise::testing::TempDir;
using mixdenoise::testing::write_file;

namespace {

const LanguageId en("en");
const LanguageId fr("fr");
const LanguageId de("de");

// Independent line counter: non-blank lines after '\r' removal.
std::size_t count_nonblank(const std::string& text) {
  std::size_t n = 0;
  std::string line;
  for (const char c : text + "\n") {
    if (c == '\n') {
      if (line.find_first_not_of(" \t\r") != std::string::npos) ++n;
      line.clear();
    } else {
      line += c;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("mono loading keeps line order and drops blank lines") {
  TempDir tmp;
  write_file(tmp / "m.txt", "first line\r\n\n   \nsecond\n\t\nthird");
  const MonoShard s = load_mono(tmp / "m.txt", en);
  CHECK(s.sentences == std::vector<std::string>{"first line", "second", "third"});
  CHECK(s.summary.lines_read == 6);
  CHECK(s.summary.blank_lines == 3);
  CHECK(s.lang == en);
}

TEST_CASE("mono loading rejects empty files and bad utf-8") {
  TempDir tmp;
  write_file(tmp / "empty.txt", "\n \n");
  CHECK_THROWS_AS(load_mono(tmp / "empty.txt", en), DataError);
  write_file(tmp / "bad.txt", "fine\nbr\xc3\x28ken\n");
  try {
    load_mono(tmp / "bad.txt", en);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_mono(tmp / "missing.txt", en), DataError);
}

TEST_CASE("bitext loading parses tab-separated pairs") {
  TempDir tmp;
  write_file(tmp / "b.tsv", "hello\tbonjour\n");
  const BitextShard s = load_bitext(tmp / "b.tsv", Direction(en, fr));
  REQUIRE(s.pairs.size() == 1);
  CHECK(s.pairs[0].source == "hello");
  CHECK(s.pairs[0].target == "bonjour");
}

TEST_CASE("malformed bitext lines are skipped and counted") {
  TempDir tmp;
  std::string text;
  for (int i = 0; i < 200; ++i) text += "a" + std::to_string(i) + "\tb\n";
  text += "no tab here\n";
  write_file(tmp / "b.tsv", text);
  const BitextShard s = load_bitext(tmp / "b.tsv", Direction(en, fr));
  CHECK(s.pairs.size() == 200);
  CHECK(s.summary.malformed_lines == 1);
  CHECK(s.summary.malformed_examples == std::vector<std::size_t>{201});
}

TEST_CASE("too many malformed bitext lines abort the load") {
  TempDir tmp;
  write_file(tmp / "b.tsv", "a\tb\nc\td\nbroken\n");
  CHECK_THROWS_AS(load_bitext(tmp / "b.tsv", Direction(en, fr)), DataError);
  BitextLoadOptions lenient;
  lenient.reject_threshold = 0.5;
  CHECK(load_bitext(tmp / "b.tsv", Direction(en, fr), lenient).pairs.size() == 2);
  write_file(tmp / "c.tsv", "a\t\n\tb\na\tb\tc\n");
  lenient.reject_threshold = 1.0;
  CHECK_THROWS_AS(load_bitext(tmp / "c.tsv", Direction(en, fr), lenient),
                  DataError);
}

TEST_CASE("bitext max_pairs keeps a prefix") {
  TempDir tmp;
  write_file(tmp / "b.tsv", "a\t1\nb\t2\nc\t3\n");
  BitextLoadOptions options;
  options.max_pairs = 2;
  const auto s = load_bitext(tmp / "b.tsv", Direction(en, fr), options);
  REQUIRE(s.pairs.size() == 2);
  CHECK(s.pairs[1].source == "b");
}

TEST_CASE("a direction needs two different languages") {
  CHECK_THROWS_AS(Direction(en, en), ConfigError);
  CHECK_THROWS_AS(Direction::parse("en-en"), ConfigError);
  CHECK_THROWS_AS(LanguageId("EN"), ConfigError);
  CHECK_THROWS_AS(LanguageId("e"), ConfigError);
  CHECK(Direction::parse("en-fr") == Direction(en, fr));
}

TEST_CASE("dictionary files accumulate deduplicated alternatives") {
  TempDir tmp;
  write_file(tmp / "d" / "en-fr.txt",
             "dog chien\ndog clebs\ndog chien\ngood morning\tbonjour\n"
             "ice cream glace à la crème\nlonely\n");
  write_file(tmp / "d" / "en-de.txt", "dog Hund\n");
  write_file(tmp / "d" / "notes.md", "ignored");
  write_file(tmp / "d" / "xx.txt", "ignored");
  const Dictionary d = load_dictionary(tmp / "d", {en, fr});
  const auto dog = d.lookup(en, "dog", fr);
  CHECK(std::vector<std::string>(dog.begin(), dog.end()) ==
        std::vector<std::string>{"chien", "clebs"});
  CHECK(d.lookup(en, "cat", fr).empty());
  CHECK(d.lookup(fr, "dog", en).empty());
  // en-de is outside the requested languages.
  CHECK(d.lookup(en, "dog", de).empty());
  // The word is the first whitespace-delimited field.
  CHECK(d.lookup(en, "good", fr)[0] == "morning\tbonjour");
  CHECK(d.lookup(en, "ice", fr)[0] == "cream glace à la crème");
  CHECK(d.summary().malformed_lines == 1);
  CHECK(d.entry_count(Direction(en, fr)) == 3);
  CHECK(d.coverage().at(en) == 3);
  // Lookup is pure.
  CHECK(d.lookup(en, "dog", fr).size() == d.lookup(en, "dog", fr).size());
}

TEST_CASE("dictionary loading needs a matching file") {
  TempDir tmp;
  write_file(tmp / "d" / "en-de.txt", "dog Hund\n");
  CHECK_THROWS_AS(load_dictionary(tmp / "d", {en, fr}), DataError);
  CHECK_THROWS_AS(load_dictionary(tmp / "nope", {en, fr}), DataError);
}

TEST_CASE("manifest sizes are additive and exact") {
  TempDir tmp;
  const std::string a = "1\n2\n3\n";
  const std::string b = "4\n\n5\n6\n7\n";
  write_file(tmp / "a.txt", a);
  write_file(tmp / "b.txt", b);
  const std::vector<MonoShard> mono{load_mono(tmp / "a.txt", en),
                                    load_mono(tmp / "b.txt", en)};
  const CorpusManifest m = build_manifest(mono, {}, Dictionary{});
  CHECK(m.mono_sizes.at(en) == count_nonblank(a) + count_nonblank(b));
  CHECK(m.mono_sizes.at(en) == 7);
  CHECK(m.bitext_sizes.empty());
  CHECK(m.total_mono() == 7);
}

TEST_CASE("manifest serialization is order independent and round-trips") {
  TempDir tmp;
  mixdenoise::testing::make_synthetic_corpus(tmp.path());
  std::vector<MonoShard> mono{load_mono(tmp / "mono.en.txt", en),
                              load_mono(tmp / "mono.de.txt", de),
                              load_mono(tmp / "mono.fr.txt", fr)};
  std::vector<BitextShard> bitext{
      load_bitext(tmp / "bitext.en-de.tsv", Direction(en, de)),
      load_bitext(tmp / "bitext.fr-en.tsv", Direction(fr, en))};
  const Dictionary dict = load_dictionary(tmp / "dict", {en, de, fr});
  const CorpusManifest m = build_manifest(mono, bitext, dict);
  std::reverse(mono.begin(), mono.end());
  std::reverse(bitext.begin(), bitext.end());
  CHECK(build_manifest(mono, bitext, dict).to_json() == m.to_json());
  CHECK(CorpusManifest::from_json(m.to_json()) == m);
  CHECK(m.mono_sizes.at(en) == 600);
  CHECK(m.bitext_sizes.at(Direction(fr, en)) == 60);
  // 150 words into each of two other languages.
  CHECK(m.dict_coverage.at(fr) == 300);
}

TEST_CASE("manifest rejects duplicate registrations and missing mono") {
  const MonoShard s{en, {"x"}, "same.txt", {}};
  const std::vector<MonoShard> twice{s, s};
  CHECK_THROWS_AS(build_manifest(twice, {}, Dictionary{}), DataError);
  CHECK_THROWS_AS(build_manifest({}, {}, Dictionary{}), DataError);
  const MonoShard other{fr, {"x"}, "same.txt", {}};
  const std::vector<MonoShard> two_langs{s, other};
  CHECK_NOTHROW(build_manifest(two_langs, {}, Dictionary{}));
}
