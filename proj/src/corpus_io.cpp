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

#include "mixdenoise/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mixdenoise/error.hpp"
#include "mixdenoise/text.hpp"

namespace mixdenoise {
namespace {

constexpr std::size_t kMaxMalformedExamples = 10;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

bool is_space(char c) { return c == ' ' || c == '\t'; }

std::string_view trim(std::string_view s) { return trim_unicode(s); }

// Calls fn(line_number, line) for every line, '\r' stripped.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t number = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++number, line);
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
}

std::string load_utf8(const std::filesystem::path& path) {
  std::string text = read_file(path);
  if (const auto bad = first_invalid_utf8_line(text); bad != 0) {
    throw DataError("'" + path.string() + "' line " + std::to_string(bad) +
                    ": invalid UTF-8");
  }
  return text;
}

void note_malformed(LoadSummary& summary, std::size_t line) {
  ++summary.malformed_lines;
  if (summary.malformed_examples.size() < kMaxMalformedExamples) {
    summary.malformed_examples.push_back(line);
  }
}

}  // namespace

MonoShard load_mono(const std::filesystem::path& path,
                    const LanguageId& lang) {
  const std::string text = load_utf8(path);
  MonoShard shard{lang, {}, path.string(), {}};
  for_each_line(text, [&](std::size_t, std::string_view line) {
    ++shard.summary.lines_read;
    if (trim(line).empty()) {
      ++shard.summary.blank_lines;
      return;
    }
    shard.sentences.emplace_back(line);
  });
  if (shard.sentences.empty()) {
    throw DataError("'" + path.string() + "': zero usable lines");
  }
  return shard;
}

BitextShard load_bitext(const std::filesystem::path& path,
                        const Direction& direction,
                        const BitextLoadOptions& options) {
  if (!(options.reject_threshold >= 0.0 && options.reject_threshold <= 1.0)) {
    throw ConfigError("reject threshold must be in [0, 1]");
  }
  const std::string text = load_utf8(path);
  BitextShard shard{direction, {}, path.string(), {}};
  for_each_line(text, [&](std::size_t number, std::string_view line) {
    ++shard.summary.lines_read;
    if (trim(line).empty()) {
      ++shard.summary.blank_lines;
      return;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      note_malformed(shard.summary, number);
      return;
    }
    const auto source = trim(line.substr(0, tab));
    const auto target = trim(line.substr(tab + 1));
    if (source.empty() || target.empty() ||
        target.find('\t') != std::string_view::npos) {
      note_malformed(shard.summary, number);
      return;
    }
    shard.pairs.push_back({std::string(source), std::string(target)});
  });

  const std::size_t usable =
      shard.summary.lines_read - shard.summary.blank_lines;
  if (usable > 0 && static_cast<double>(shard.summary.malformed_lines) >
                        options.reject_threshold * static_cast<double>(usable)) {
    throw DataError("'" + path.string() + "': " +
                    std::to_string(shard.summary.malformed_lines) + " of " +
                    std::to_string(usable) +
                    " lines malformed, above the reject threshold");
  }
  if (shard.pairs.empty()) {
    throw DataError("'" + path.string() + "': zero usable pairs");
  }
  if (options.max_pairs > 0 && shard.pairs.size() > options.max_pairs) {
    shard.pairs.resize(options.max_pairs);
  }
  return shard;
}

void Dictionary::add(const Direction& direction, std::string word,
                     std::string translation) {
  auto& alternatives = tables_[direction][std::move(word)];
  if (std::find(alternatives.begin(), alternatives.end(), translation) ==
      alternatives.end()) {
    alternatives.push_back(std::move(translation));
  }
}

std::span<const std::string> Dictionary::lookup(const LanguageId& source,
                                                std::string_view word,
                                                const LanguageId& target) const {
  if (source == target) return {};
  const auto table = tables_.find(Direction(source, target));
  if (table == tables_.end()) return {};
  const auto entry = table->second.find(word);
  if (entry == table->second.end()) return {};
  return entry->second;
}

std::vector<Direction> Dictionary::directions() const {
  std::vector<Direction> out;
  for (const auto& [direction, table] : tables_) out.push_back(direction);
  return out;
}

std::size_t Dictionary::entry_count(const Direction& direction) const {
  const auto it = tables_.find(direction);
  return it == tables_.end() ? 0 : it->second.size();
}

std::map<LanguageId, std::uint64_t> Dictionary::coverage() const {
  std::map<LanguageId, std::uint64_t> out;
  for (const auto& [direction, table] : tables_) {
    out[direction.src] += table.size();
  }
  return out;
}

Dictionary load_dictionary(const std::filesystem::path& dir,
                           const std::set<LanguageId>& langs) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw DataError("dictionary directory '" + dir.string() +
                    "' does not exist");
  }
  std::vector<std::pair<fs::path, Direction>> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (!item.is_regular_file() || item.path().extension() != ".txt") continue;
    const std::string stem = item.path().stem().string();
    const auto dash = stem.find('-');
    if (dash == std::string::npos) continue;
    const std::string src = stem.substr(0, dash);
    const std::string tgt = stem.substr(dash + 1);
    if (!LanguageId::is_valid(src) || !LanguageId::is_valid(tgt) || src == tgt) {
      continue;
    }
    Direction direction{LanguageId(src), LanguageId(tgt)};
    if (langs.count(direction.src) && langs.count(direction.tgt)) {
      files.emplace_back(item.path(), std::move(direction));
    }
  }
  if (files.empty()) {
    throw DataError("no dictionary file found in '" + dir.string() +
                    "' for the requested languages");
  }
  // directory_iterator order is unspecified.
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });

  Dictionary dict;
  for (const auto& [path, direction] : files) {
    const std::string text = load_utf8(path);
    for_each_line(text, [&](std::size_t number, std::string_view raw) {
      ++dict.summary().lines_read;
      const auto line = trim(raw);
      if (line.empty()) {
        ++dict.summary().blank_lines;
        return;
      }
      const auto split = std::find_if(line.begin(), line.end(), is_space);
      if (split == line.end()) {
        note_malformed(dict.summary(), number);
        return;
      }
      const std::string_view word(line.begin(), split);
      const auto translation =
          trim(std::string_view(split, line.end()));
      if (translation.empty()) {
        note_malformed(dict.summary(), number);
        return;
      }
      dict.add(direction, std::string(word), std::string(translation));
    });
  }
  return dict;
}

std::uint64_t CorpusManifest::total_mono() const {
  return std::accumulate(mono_sizes.begin(), mono_sizes.end(), std::uint64_t{0},
                         [](std::uint64_t acc, const auto& kv) {
                           return acc + kv.second;
                         });
}

std::uint64_t CorpusManifest::total_bitext() const {
  return std::accumulate(bitext_sizes.begin(), bitext_sizes.end(),
                         std::uint64_t{0}, [](std::uint64_t acc, const auto& kv) {
                           return acc + kv.second;
                         });
}

std::string CorpusManifest::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  j["mono_sizes"] = nlohmann::json::object();
  j["bitext_sizes"] = nlohmann::json::object();
  j["dict_coverage"] = nlohmann::json::object();
  for (const auto& [lang, n] : mono_sizes) j["mono_sizes"][lang.code()] = n;
  for (const auto& [dir, n] : bitext_sizes) j["bitext_sizes"][dir.key()] = n;
  for (const auto& [lang, n] : dict_coverage) {
    j["dict_coverage"][lang.code()] = n;
  }
  return j.dump(2) + "\n";
}

CorpusManifest CorpusManifest::from_json(std::string_view text) {
  CorpusManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& [k, v] : j.at("mono_sizes").items()) {
      m.mono_sizes.emplace(LanguageId(k), v.get<std::uint64_t>());
    }
    for (const auto& [k, v] : j.at("bitext_sizes").items()) {
      m.bitext_sizes.emplace(Direction::parse(k), v.get<std::uint64_t>());
    }
    for (const auto& [k, v] : j.at("dict_coverage").items()) {
      m.dict_coverage.emplace(LanguageId(k), v.get<std::uint64_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

CorpusManifest build_manifest(std::span<const MonoShard> mono,
                              std::span<const BitextShard> bitext,
                              const Dictionary& dict) {
  if (mono.empty()) throw DataError("manifest needs at least one mono shard");
  std::set<std::pair<std::string, std::string>> seen;
  CorpusManifest m;
  for (const auto& shard : mono) {
    if (!seen.emplace(shard.source_path, shard.lang.code()).second) {
      throw DataError("duplicate shard registration: " + shard.source_path +
                      " (" + shard.lang.code() + ")");
    }
    m.mono_sizes[shard.lang] += shard.sentences.size();
  }
  for (const auto& shard : bitext) {
    if (!seen.emplace(shard.source_path, shard.direction.key()).second) {
      throw DataError("duplicate shard registration: " + shard.source_path +
                      " (" + shard.direction.key() + ")");
    }
    m.bitext_sizes[shard.direction] += shard.pairs.size();
  }
  m.dict_coverage = dict.coverage();
  return m;
}

}  // namespace mixdenoise
