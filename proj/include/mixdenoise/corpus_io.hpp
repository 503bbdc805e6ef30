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

// Loading of monolingual corpora, bitext and bilingual dictionaries, and the
// size manifest that parameterizes sampling.

#ifndef MIXDENOISE_CORPUS_IO_HPP_
#define MIXDENOISE_CORPUS_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixdenoise/language.hpp"

namespace mixdenoise {

struct LoadSummary {
  std::size_t lines_read = 0;
  std::size_t blank_lines = 0;
  std::size_t malformed_lines = 0;
  // 1-based line numbers of the first few malformed lines.
  std::vector<std::size_t> malformed_examples;
};

struct MonoShard {
  LanguageId lang;
  std::vector<std::string> sentences;
  std::string source_path;
  LoadSummary summary;
};

struct SentencePair {
  std::string source;
  std::string target;
};

struct BitextShard {
  Direction direction;
  std::vector<SentencePair> pairs;
  std::string source_path;
  LoadSummary summary;
};

struct BitextLoadOptions {
  // Fraction of non-blank lines that may be malformed before loading aborts.
  double reject_threshold = 0.01;
  // Keep at most this many pairs; 0 keeps all.
  std::size_t max_pairs = 0;
};

// One sentence per line. Whitespace-only lines are dropped; a trailing '\r'
// is stripped.
MonoShard load_mono(const std::filesystem::path& path, const LanguageId& lang);

// `source<TAB>target` per line. Lines without a tab or with an empty side are
// skipped and counted in the summary.
BitextShard load_bitext(const std::filesystem::path& path,
                        const Direction& direction,
                        const BitextLoadOptions& options = {});

// Directional word -> translation tables, one per (source, target) pair.
class Dictionary {
 public:
  // Adds one alternative; duplicates are ignored. Order of first insertion is
  // kept so uniform choice over alternatives is reproducible.
  void add(const Direction& direction, std::string word,
           std::string translation);

  // Exact-match lookup; empty when absent.
  std::span<const std::string> lookup(const LanguageId& source,
                                      std::string_view word,
                                      const LanguageId& target) const;

  bool has_entry(const LanguageId& source, std::string_view word,
                 const LanguageId& target) const {
    return !lookup(source, word, target).empty();
  }

  bool empty() const noexcept { return tables_.empty(); }
  std::vector<Direction> directions() const;
  std::size_t entry_count(const Direction& direction) const;

  // Number of (word, target language) entries per source language.
  std::map<LanguageId, std::uint64_t> coverage() const;

  const LoadSummary& summary() const noexcept { return summary_; }
  LoadSummary& summary() noexcept { return summary_; }

 private:
  using Table =
      std::map<std::string, std::vector<std::string>, std::less<>>;
  std::map<Direction, Table> tables_;
  LoadSummary summary_;
};

// Reads every `<src>-<tgt>.txt` in `dir` whose two languages are both in
// `langs`. Each line is a word, a whitespace run, then the translation (which
// may contain spaces). Malformed lines are skipped and counted.
Dictionary load_dictionary(const std::filesystem::path& dir,
                           const std::set<LanguageId>& langs);

struct CorpusManifest {
  std::map<LanguageId, std::uint64_t> mono_sizes;
  std::map<Direction, std::uint64_t> bitext_sizes;
  std::map<LanguageId, std::uint64_t> dict_coverage;

  std::uint64_t total_mono() const;
  std::uint64_t total_bitext() const;

  // Pretty-printed JSON with sorted keys; bitext keys are "src-tgt".
  std::string to_json() const;
  static CorpusManifest from_json(std::string_view text);

  friend bool operator==(const CorpusManifest&,
                         const CorpusManifest&) = default;
};

// Throws DataError on an empty mono list or a duplicate shard registration.
CorpusManifest build_manifest(std::span<const MonoShard> mono,
                              std::span<const BitextShard> bitext,
                              const Dictionary& dict);

}  // namespace mixdenoise

#endif  // MIXDENOISE_CORPUS_IO_HPP_
