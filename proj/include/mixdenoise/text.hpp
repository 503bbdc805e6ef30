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

// UTF-8 helpers shared by corpus loading and tokenization.

#ifndef MIXDENOISE_TEXT_HPP_
#define MIXDENOISE_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mixdenoise {

struct CodePoint {
  std::uint32_t value;
  std::size_t offset;  // byte offset in the input
  std::size_t length;  // byte length
};

// Lenient decoder: each invalid byte becomes U+FFFD of length 1.
std::vector<CodePoint> decode_utf8(std::string_view text);

// 1-based line number of the first line holding invalid UTF-8 (overlong
// forms and surrogates included), or 0 when the text is valid.
std::size_t first_invalid_utf8_line(std::string_view text);

bool is_unicode_space(std::uint32_t cp) noexcept;
bool is_punctuation(std::uint32_t cp) noexcept;

// True when `text` holds nothing but Unicode whitespace.
bool is_blank(std::string_view text);

// Strips Unicode whitespace from both ends.
std::string_view trim_unicode(std::string_view text);

}  // namespace mixdenoise

#endif  // MIXDENOISE_TEXT_HPP_
