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

#include "mixdenoise/tokenizer.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "mixdenoise/error.hpp"
#include "mixdenoise/text.hpp"

namespace mixdenoise {
namespace {

void split_chunk(std::string_view text, std::span<const CodePoint> chunk,
                 Words& out) {
  const auto piece = [&](std::size_t first, std::size_t last) {
    // Code points [first, last).
    const std::size_t begin = chunk[first].offset;
    const std::size_t end = chunk[last - 1].offset + chunk[last - 1].length;
    return std::string(text.substr(begin, end - begin));
  };
  std::size_t lo = 0;
  std::size_t hi = chunk.size();
  while (lo < hi && is_punctuation(chunk[lo].value)) {
    out.push_back(piece(lo, lo + 1));
    ++lo;
  }
  std::size_t core_end = hi;
  while (core_end > lo && is_punctuation(chunk[core_end - 1].value)) --core_end;
  if (core_end > lo) out.push_back(piece(lo, core_end));
  for (std::size_t k = core_end; k < hi; ++k) out.push_back(piece(k, k + 1));
}

}  // namespace

Words tokenize_words(std::string_view text) {
  const auto cps = decode_utf8(text);
  Words out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= cps.size(); ++i) {
    if (i == cps.size() || is_unicode_space(cps[i].value)) {
      if (i > start) {
        split_chunk(text, std::span(cps).subspan(start, i - start), out);
      }
      start = i + 1;
    }
  }
  return out;
}

std::string lang_tag_token(const LanguageId& lang) {
  return "<lang_" + lang.code() + ">";
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) {
  const std::string_view fixed[] = {kPadToken, kUnkToken, kBosToken, kEosToken,
                                    kMaskToken};
  if (tokens.size() < kFixedSpecials) {
    throw DataError("vocabulary lacks the special tokens");
  }
  for (std::size_t i = 0; i < kFixedSpecials; ++i) {
    if (tokens[i] != fixed[i]) {
      throw DataError("vocabulary id " + std::to_string(i) + " must be '" +
                      std::string(fixed[i]) + "'");
    }
  }
  Vocab v;
  constexpr std::string_view prefix = "<lang_";
  std::size_t i = kFixedSpecials;
  for (; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t.size() <= prefix.size() + 1 || t.compare(0, prefix.size(), prefix) ||
        t.back() != '>') {
      break;
    }
    LanguageId lang(t.substr(prefix.size(), t.size() - prefix.size() - 1));
    if (!v.languages_.empty() && !(v.languages_.back() < lang)) {
      throw DataError("language tags must be sorted and unique");
    }
    v.languages_.push_back(std::move(lang));
  }
  v.tokens_ = std::move(tokens);
  v.index_.reserve(v.tokens_.size());
  for (std::size_t k = 0; k < v.tokens_.size(); ++k) {
    if (v.tokens_[k].empty()) throw DataError("empty token in vocabulary");
    if (!v.index_.emplace(v.tokens_[k], static_cast<TokenId>(k)).second) {
      throw DataError("duplicate token '" + v.tokens_[k] + "' in vocabulary");
    }
  }
  return v;
}

std::optional<TokenId> Vocab::find(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocab::token(TokenId id) const {
  if (id >= tokens_.size()) {
    throw DataError("token id " + std::to_string(id) +
                    " outside vocabulary of size " +
                    std::to_string(tokens_.size()));
  }
  return tokens_[id];
}

TokenId Vocab::lang_tag(const LanguageId& lang) const {
  const auto it = std::lower_bound(languages_.begin(), languages_.end(), lang);
  if (it == languages_.end() || *it != lang) {
    throw ConfigError("vocabulary has no tag for language '" + lang.code() +
                      "'");
  }
  return static_cast<TokenId>(kFixedSpecials + (it - languages_.begin()));
}

std::string Vocab::to_json() const {
  return nlohmann::json(tokens_).dump(1) + "\n";
}

Vocab Vocab::from_json(std::string_view text) {
  try {
    return from_tokens(
        nlohmann::json::parse(text).get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed vocabulary file: ") + e.what());
  }
}

WordCounts count_words(std::span<const MonoShard> mono,
                       std::span<const BitextShard> bitext) {
  WordCounts counts;
  const auto add = [&](std::string_view line) {
    for (auto& w : tokenize_words(line)) ++counts[std::move(w)];
  };
  for (const auto& shard : mono) {
    for (const auto& s : shard.sentences) add(s);
  }
  for (const auto& shard : bitext) {
    for (const auto& p : shard.pairs) {
      add(p.source);
      add(p.target);
    }
  }
  return counts;
}

Vocab build_vocab(const WordCounts& counts,
                  std::span<const LanguageId> languages, std::size_t size) {
  const std::set<LanguageId> langs(languages.begin(), languages.end());
  const std::size_t specials = Vocab::kFixedSpecials + langs.size();
  if (size <= specials) {
    throw ConfigError("vocabulary size " + std::to_string(size) +
                      " must exceed the " + std::to_string(specials) +
                      " special tokens");
  }
  std::vector<std::string> tokens{std::string(kPadToken), std::string(kUnkToken),
                                  std::string(kBosToken), std::string(kEosToken),
                                  std::string(kMaskToken)};
  for (const auto& lang : langs) tokens.push_back(lang_tag_token(lang));

  std::vector<std::pair<std::string_view, std::uint64_t>> ranked(
      counts.begin(), counts.end());
  // `counts` iterates in byte order, so a stable sort on frequency leaves
  // ties lexicographic.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  const std::size_t keep = std::min(size - specials, ranked.size());
  for (std::size_t i = 0; i < keep; ++i) tokens.emplace_back(ranked[i].first);
  return Vocab::from_tokens(std::move(tokens));
}

Vocab build_vocab(std::span<const MonoShard> mono,
                  std::span<const BitextShard> bitext, std::size_t size,
                  std::span<const LanguageId> extra_languages) {
  std::vector<LanguageId> langs(extra_languages.begin(), extra_languages.end());
  for (const auto& s : mono) langs.push_back(s.lang);
  for (const auto& s : bitext) {
    langs.push_back(s.direction.src);
    langs.push_back(s.direction.tgt);
  }
  return build_vocab(count_words(mono, bitext), langs, size);
}

TokenSeq encode(std::span<const std::string> words, const LanguageId& lang,
                const Vocab& vocab, Framing framing) {
  TokenSeq seq{{}, lang};
  seq.ids.reserve(words.size() + 2);
  const TokenId tag = vocab.lang_tag(lang);
  if (framing == Framing::kTarget) seq.ids.push_back(tag);
  for (const auto& w : words) seq.ids.push_back(vocab.id(w));
  if (framing == Framing::kSource) seq.ids.push_back(tag);
  seq.ids.push_back(Vocab::kEos);
  return seq;
}

Words decode(const TokenSeq& seq, const Vocab& vocab) {
  Words out;
  out.reserve(seq.ids.size());
  for (const TokenId id : seq.ids) {
    const std::string& token = vocab.token(id);
    if (id == Vocab::kPad || id == Vocab::kBos || id == Vocab::kEos ||
        vocab.is_lang_tag(id)) {
      continue;
    }
    out.push_back(token);
  }
  return out;
}

}  // namespace mixdenoise
