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

#ifndef MIXDENOISE_TOKENIZER_HPP_
#define MIXDENOISE_TOKENIZER_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mixdenoise/corpus_io.hpp"
#include "mixdenoise/language.hpp"

namespace mixdenoise {

using TokenId = std::uint32_t;
using Words = std::vector<std::string>;

// Splits on Unicode whitespace, then peels leading and trailing punctuation
// off each chunk one character at a time. Interior punctuation ("l'homme",
// "3.5") stays attached. Never yields empty tokens.
Words tokenize_words(std::string_view text);

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kMaskToken = "<mask>";

std::string lang_tag_token(const LanguageId& lang);

// Word-level vocabulary. Id layout: PAD, UNK, BOS, EOS, MASK, one language
// tag per language sorted by code, then words by descending frequency.
class Vocab {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kBos = 2;
  static constexpr TokenId kEos = 3;
  static constexpr TokenId kMask = 4;
  static constexpr std::size_t kFixedSpecials = 5;

  // Validates the special-token layout. Throws DataError on violations.
  static Vocab from_tokens(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t special_count() const noexcept {
    return kFixedSpecials + languages_.size();
  }
  const std::vector<LanguageId>& languages() const noexcept {
    return languages_;
  }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::optional<TokenId> find(const std::string& token) const;
  // UNK for unknown tokens.
  TokenId id(const std::string& token) const {
    return find(token).value_or(kUnk);
  }
  // Throws DataError for out-of-range ids.
  const std::string& token(TokenId id) const;
  // Throws ConfigError when the language has no tag.
  TokenId lang_tag(const LanguageId& lang) const;

  bool is_lang_tag(TokenId id) const noexcept {
    return id >= kFixedSpecials && id < special_count();
  }

  // JSON array of tokens in id order.
  std::string to_json() const;
  static Vocab from_json(std::string_view text);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
  std::vector<LanguageId> languages_;
};

using WordCounts = std::map<std::string, std::uint64_t, std::less<>>;

// Counts word types over mono sentences and both bitext sides.
WordCounts count_words(std::span<const MonoShard> mono,
                       std::span<const BitextShard> bitext);

// Keeps the (size - specials) most frequent types, ties broken by byte order.
// Throws ConfigError when size does not exceed the special-token count.
Vocab build_vocab(const WordCounts& counts,
                  std::span<const LanguageId> languages, std::size_t size);

// Languages are taken from the shards plus `extra_languages`.
Vocab build_vocab(std::span<const MonoShard> mono,
                  std::span<const BitextShard> bitext, std::size_t size,
                  std::span<const LanguageId> extra_languages = {});

struct TokenSeq {
  std::vector<TokenId> ids;
  LanguageId lang;

  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

// Source framing: words, language tag, EOS.
// Target framing: language tag, words, EOS.
enum class Framing { kSource, kTarget };

TokenSeq encode(std::span<const std::string> words, const LanguageId& lang,
                const Vocab& vocab, Framing framing = Framing::kSource);

// Drops PAD, BOS, EOS and language tags; every other id maps to its token.
// Throws DataError for ids outside the vocabulary.
Words decode(const TokenSeq& seq, const Vocab& vocab);

}  // namespace mixdenoise

#endif  // MIXDENOISE_TOKENIZER_HPP_
